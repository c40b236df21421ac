import java.util.function.Function;
import java.util.function.Predicate;
import java.util.function.Supplier;
class K09a {
    Predicate<String> empty = s -> s.isEmpty();
    Function<Integer, Integer> inc = x -> x + 1;
    Supplier<String> hello = () -> "hi";
}
