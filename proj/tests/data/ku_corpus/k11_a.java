class K11a {
    int parse(String s) throws Exception {
        try {
            return Integer.parseInt(s.trim());
        } catch (NumberFormatException e) {
            throw new IllegalStateException("bad");
        } finally {
        }
    }
}
