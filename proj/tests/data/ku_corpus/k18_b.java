import java.util.Locale;
import java.util.ResourceBundle;
class K18b {
    String msg(String key) {
        ResourceBundle b = ResourceBundle.getBundle("app", new Locale("en"));
        return b.getString(key);
    }
}
