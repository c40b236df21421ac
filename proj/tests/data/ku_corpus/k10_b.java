import java.util.List;
import java.util.Optional;
import java.util.stream.Collectors;
class K10b {
    List<Integer> work(List<Integer> xs) {
        Optional<Integer> first = xs.stream().sorted().findFirst();
        return xs.stream().flatMap(x -> java.util.stream.Stream.of(x))
                 .collect(Collectors.toList());
    }
}
