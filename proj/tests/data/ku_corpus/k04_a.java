class K04a {
    void m(int n) {
        for (int i = 0; i < n; i++) {
            if (i == 3) { break; }
            if (i == 1) { continue; }
        }
        for (char c : "ab".toCharArray()) { }
    }
}
