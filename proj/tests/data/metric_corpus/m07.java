class M07 {
    boolean gate(boolean a, boolean b, boolean c) {
        return a && b || c;
    }
    int pick(int v) {
        return v > 0 ? v : v < -5 ? -v : 0;
    }
}
