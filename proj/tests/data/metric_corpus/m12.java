import java.util.List;
import java.util.Map;
class M12 {
    List<String> names;
    Map<String, Integer> index;
    Thread worker;
}
