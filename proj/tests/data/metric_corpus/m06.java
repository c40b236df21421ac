class M06 {
    void risky(boolean flag) {
        try {
            if (flag) {
                throw new IllegalStateException("boom");
            }
        } catch (RuntimeException e) {
            cleanup();
        } finally {
            cleanup();
        }
    }
    void cleanup() { }
}
