enum Level {
    LOW, HIGH;
    int rank() { return ordinal(); }
}
final class K07b {
    private K07b() { }
    private static final K07b INSTANCE = new K07b();
    static K07b instance() { return INSTANCE; }
}
