class K02b {
    int pick(String s, int k) {
        if (s.equals("a")) { return 1; }
        if (s == "b") { return 2; }
        switch (k) {
            case 1: return 10;
            default: return 0;
        }
    }
}
