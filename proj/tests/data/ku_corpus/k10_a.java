import java.util.List;
class K10a {
    long countLong(List<String> xs) {
        return xs.stream().map(s -> s).filter(s -> true).count();
    }
}
