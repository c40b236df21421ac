#include "kupred/ku/rules.hpp"

#include <stdexcept>

namespace kupred::ku {

namespace {

std::vector<CapabilityRule> build_rules() {
    std::vector<CapabilityRule> r;
    auto add = [&](int ku, int cap, const char* desc) {
        r.push_back({ku, cap,
                     "K" + std::to_string(ku) + ".C" + std::to_string(cap),
                     desc});
    };

    // K1 Data Type
    add(1, 1, "variable declarator with an initializer; cast to a primitive type");

    // K2 Operator and Decision
    add(2, 1, "assignment expression; prefix/postfix increment or decrement");
    add(2, 2, "equals()/equalsIgnoreCase() call; ==/!= against a string literal");
    add(2, 3, "if statement; ternary conditional expression");
    add(2, 4, "switch statement");

    // K3 Array
    add(3, 1, "one-dimensional array creation or declaration");
    add(3, 2, "multi-dimensional array creation or declaration");

    // K4 Loop
    add(4, 1, "while loop");
    add(4, 2, "for loop, basic or enhanced");
    add(4, 3, "do-while loop");
    add(4, 4, "break statement");
    add(4, 5, "continue statement");

    // K5 Method and Encapsulation
    add(5, 1, "method declared with parameters and a non-void return type");
    add(5, 2, "static modifier on a method, field or initializer block");
    add(5, 3, "method or constructor participating in an overload group");
    add(5, 4, "this(...) constructor chain call");
    add(5, 5, "variable-arity parameter declaration");
    add(5, 6, "explicit access modifier (public/private/protected)");
    add(5, 7, "getter or setter for a private field of the same class");
    add(5, 8, "final class whose private fields are set in a constructor");

    // K6 Inheritance
    add(6, 1, "declarator typed T initialized with new S() where S != T");
    add(6, 2, "object creation passed directly as a call argument");
    add(6, 3, "@Override annotation; signature match against a local supertype");
    add(6, 4, "abstract modifier on a class or method");
    add(6, 5, "interface declaration; implements clause type");
    add(6, 6, "super(...) call; super.member access");
    add(6, 7, "cast to a reference type");

    // K7 Advanced Class Design
    add(7, 1, "nested, local or anonymous class declaration");
    add(7, 2, "final modifier");
    add(7, 3, "enum declaration");
    add(7, 4, "singleton pattern: private constructor plus static self-typed accessor");

    // K8 Generics and Collection
    add(8, 1, "generic type declaration; instantiation with type arguments");
    add(8, 2, "ArrayList/TreeSet/TreeMap/ArrayDeque type use");
    add(8, 3, "Comparator/Comparable type use");
    add(8, 4, "forEach(...) call");

    // K9 Functional Interface
    add(9, 1, "Predicate/Consumer/Function/Supplier type use");
    add(9, 2, "primitive functional interface type use (IntPredicate, ...)");
    add(9, 3, "binary functional interface type use (BiFunction, ...)");
    add(9, 4, "UnaryOperator type use");

    // K10 Stream API
    add(10, 1, "peek()/map()/mapTo*() call");
    add(10, 2, "findFirst/findAny/anyMatch/allMatch/noneMatch call");
    add(10, 3, "Optional type use or Optional static factory call");
    add(10, 4, "stream()/parallelStream()/count/sum/average/reduce call");
    add(10, 5, "sorted() call");
    add(10, 6, "collect() call");
    add(10, 7, "flatMap*() call");

    // K11 Exception
    add(11, 1, "try statement");
    add(11, 2, "catch clause; finally block");
    add(11, 3, "try-with-resources statement");
    add(11, 4, "exception/AutoCloseable type declaration");
    add(11, 5, "throws clause on a declaration; throw statement");
    add(11, 6, "common platform exception type use");
    add(11, 7, "assert statement");

    // K12 Date Time API
    add(12, 1, "LocalDate/LocalTime/LocalDateTime static factory call");
    add(12, 2, "zone-aware date-time type use (ZonedDateTime, ZoneId, ...)");
    add(12, 3, "Instant/Period/Duration/ChronoUnit use");
    add(12, 4, "date-time type reference in a declaration");

    // K13 IO
    add(13, 1, "System.in/out/err access; console access");
    add(13, 2, "java.io stream/reader/writer type use");

    // K14 NIO
    add(14, 1, "Path/Paths use");
    add(14, 2, "Files static call; NIO support type use");

    // K15 String Processing
    add(15, 1, "string search/parse call (substring, split, charAt, ...)");
    add(15, 2, "StringBuilder/StringBuffer type use");
    add(15, 3, "Pattern/Matcher regular expression use");
    add(15, 4, "printf call; String.format call");

    // K16 Concurrency
    add(16, 1, "Runnable/Callable/Thread/ExecutorService use");
    add(16, 2, "synchronized keyword; java.util.concurrent.atomic type use");
    add(16, 3, "java.util.concurrent collection/utility type use");
    add(16, 4, "fork/join framework type use");

    // K17 Database
    add(17, 1, "core JDBC interface type use");
    add(17, 2, "query execution call (executeQuery, prepareStatement, ...)");

    // K18 Localization
    add(18, 1, "Locale type use or Locale static call");
    add(18, 2, "ResourceBundle use");

    // K19 Java Persistence
    add(19, 1, "JPA mapping annotation (@Entity, @Table, @Id, ...)");
    add(19, 2, "EntityManager/persistence-context use");
    add(19, 3, "JPQL query creation (createQuery, TypedQuery, ...)");

    // K20 Enterprise Java Bean
    add(20, 1, "session-bean annotation or EJB context type use");
    add(20, 2, "EJB timer use (@Schedule, @Timeout, TimerService, ...)");

    // K21 Java Message Service API
    add(21, 1, "JMS producer/consumer type or @MessageDriven use");
    add(21, 2, "transacted JMS session use (XA types, getTransacted)");

    // K22 SOAP Web Service
    add(22, 1, "JAX-WS annotation or SOAP type use");
    add(22, 2, "JAXB annotation or marshalling type use");

    // K23 Servlet
    add(23, 1, "servlet class/annotation; doGet/doPost-style handler");
    add(23, 2, "HTTP request/response/parameter/cookie handling");
    add(23, 3, "servlet lifecycle/filter use (@WebFilter, FilterChain, ...)");

    // K24 Java REST API
    add(24, 1, "REST convention annotation (@GET, @Produces, ...)");
    add(24, 2, "JAX-RS resource/client API use (@Path, WebTarget, ...)");

    // K25 Websocket
    add(25, 1, "websocket endpoint annotation or container type use");
    add(25, 2, "@OnMessage; websocket message encode/decode type use");

    // K26 Java Server Faces
    add(26, 1, "JSF component annotation or FacesContext/UIComponent use");
    add(26, 2, "FacesMessage use; addMessage call");
    add(26, 3, "expression-language type use (ELContext, ValueExpression, ...)");

    // K27 Contexts and Dependency Injection
    add(27, 1, "CDI annotation (@Inject, @Named, scopes, ...) or Event/Instance use");

    // K28 Batch Processing
    add(28, 1, "batch API type or @BatchProperty use");

    return r;
}

} // namespace

const std::vector<CapabilityRule>& all_rules() {
    static const std::vector<CapabilityRule> rules = build_rules();
    return rules;
}

int capability_count(int ku) {
    int n = 0;
    for (const auto& r : all_rules())
        if (r.ku == ku) ++n;
    return n;
}

const char* ku_display_name(int ku) {
    static const char* names[kKuCount] = {
        "Data Type",
        "Operator and Decision",
        "Array",
        "Loop",
        "Method and Encapsulation",
        "Inheritance",
        "Advanced Class Design",
        "Generics and Collection",
        "Functional Interface",
        "Stream API",
        "Exception",
        "Date Time API",
        "IO",
        "NIO",
        "String Processing",
        "Concurrency",
        "Database",
        "Localization",
        "Java Persistence",
        "Enterprise Java Bean",
        "Java Message Service API",
        "SOAP Web Service",
        "Servlet",
        "Java REST API",
        "Websocket",
        "Java Server Faces",
        "Contexts and Dependency Injection",
        "Batch Processing",
    };
    if (ku < 1 || ku > kKuCount) throw std::out_of_range("ku id");
    return names[ku - 1];
}

std::string ku_column_name(int ku) { return "K" + std::to_string(ku); }

} // namespace kupred::ku
