class K01b {
    float f = 3.5f;
    boolean flag = true;
    void m(int x) {
        short s = (short) x;
        byte t = (byte) x;
    }
}
