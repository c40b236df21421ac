class M14 {
    static int total;
    static int step;
    void produce() {
        total = compute();
        step = 1;
    }
    int compute() {
        return total + step;
    }
    void consume() {
        compute();
    }
}
