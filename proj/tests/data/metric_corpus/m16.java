class M16 {
    void branchy(boolean a, boolean b, boolean c) {
        if (a) { log(); }
        if (b) { log(); }
        if (c) { log(); }
    }
    void log() { }
}
