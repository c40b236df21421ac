import java.nio.file.Path;
import java.nio.file.Paths;
class K14a {
    Path home = Paths.get("/home");
}
