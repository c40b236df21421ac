import java.util.ArrayList;
import java.util.TreeMap;
class K08a {
    ArrayList<String> names = new ArrayList<String>();
    TreeMap<String, Integer> ages = new TreeMap<String, Integer>();
}
