public class M09 {
    public static final int LIMIT = 10;
    private static String tag;
    protected int count;
    private boolean on, off;
    public static void reset() { tag = ""; }
    private int bump() { return count; }
    protected void toggle() { on = !on; }
    void raw() { }
}
