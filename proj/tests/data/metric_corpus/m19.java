package metrics.sample;

/**
 * Doc header.
 */
public class M19 {
    /** field doc */
    public int visible = 1;
}
