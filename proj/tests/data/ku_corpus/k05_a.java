public class K05a {
    private int value;
    public K05a() { this(0); }
    public K05a(int v) { value = v; }
    public int getValue() { return value; }
    public void setValue(int v) { value = v; }
    public static int twice(int x) { return x + x; }
}
