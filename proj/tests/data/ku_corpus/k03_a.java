class K03a {
    int[] xs = new int[3];
    void m() {
        String[] names = {"a", "b"};
        xs[0] = 1;
    }
}
