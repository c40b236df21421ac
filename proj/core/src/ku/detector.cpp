#include "kupred/ku/detector.hpp"

#include <algorithm>
#include <cassert>
#include <cctype>
#include <map>
#include <set>
#include <unordered_map>

#include <json.hpp>

#include "kupred/util/csv.hpp"
#include "kupred/util/error.hpp"
#include "kupred/util/parallel.hpp"

namespace kupred::ku {

using java::FileImports;
using java::Node;
using java::NodeKind;
using java::SyntaxTree;
using java::TypeOrigin;
using java::TypeOriginTable;

namespace {

std::string last_segment(const std::string& name) {
    auto dot = name.rfind('.');
    return dot == std::string::npos ? name : name.substr(dot + 1);
}

// One API capability keyed by type/annotation/qualifier names. `guarded`
// names are too generic to trust bare: they count only when an import or a
// qualified name pins the package.
struct ApiGroup {
    int ku;
    int cap;
    std::vector<std::string> prefixes;
    std::set<std::string> names;
    std::set<std::string> guarded;
};

const std::vector<ApiGroup>& type_ref_groups() {
    static const std::vector<ApiGroup> g = {
        {8, 2, {"java.util"}, {"ArrayList", "TreeSet", "TreeMap", "ArrayDeque"}, {}},
        {8, 3, {"java.util", "java.lang"}, {"Comparator", "Comparable"}, {}},
        {9, 1, {"java.util.function"},
         {"Predicate", "Consumer", "Function", "Supplier"}, {}},
        {9, 2, {"java.util.function"},
         {"IntPredicate", "IntConsumer", "IntFunction", "IntSupplier",
          "IntUnaryOperator", "IntBinaryOperator", "LongPredicate",
          "LongConsumer", "LongFunction", "LongSupplier", "LongUnaryOperator",
          "LongBinaryOperator", "DoublePredicate", "DoubleConsumer",
          "DoubleFunction", "DoubleSupplier", "DoubleUnaryOperator",
          "DoubleBinaryOperator", "ToIntFunction", "ToLongFunction",
          "ToDoubleFunction", "ToIntBiFunction", "ToLongBiFunction",
          "ToDoubleBiFunction", "ObjIntConsumer", "ObjLongConsumer",
          "ObjDoubleConsumer", "BooleanSupplier", "IntToLongFunction",
          "IntToDoubleFunction", "LongToIntFunction", "LongToDoubleFunction",
          "DoubleToIntFunction", "DoubleToLongFunction"},
         {}},
        {9, 3, {"java.util.function"},
         {"BiPredicate", "BiConsumer", "BiFunction", "BinaryOperator"}, {}},
        {9, 4, {"java.util.function"}, {"UnaryOperator"}, {}},
        {10, 3, {"java.util"},
         {"Optional", "OptionalInt", "OptionalLong", "OptionalDouble"}, {}},
        {11, 6, {"java.lang"},
         {"NullPointerException", "ArithmeticException",
          "ArrayIndexOutOfBoundsException", "ClassCastException",
          "NumberFormatException", "IllegalArgumentException",
          "IllegalStateException", "IndexOutOfBoundsException",
          "UnsupportedOperationException", "RuntimeException"},
         {}},
        {12, 2, {"java.time"},
         {"ZonedDateTime", "OffsetDateTime", "OffsetTime", "ZoneId",
          "ZoneOffset"},
         {}},
        {12, 3, {"java.time"},
         {"Instant", "Period", "Duration", "ChronoUnit", "TemporalUnit",
          "TemporalAmount", "TemporalAccessor", "TemporalAdjusters"},
         {}},
        {12, 4, {"java.time"},
         {"LocalDate", "LocalTime", "LocalDateTime", "DateTimeFormatter",
          "MonthDay", "YearMonth", "Year", "DayOfWeek"},
         {}},
        {13, 1, {"java.io"}, {"Console"}, {}},
        {13, 2, {"java.io"},
         {"BufferedReader", "BufferedWriter", "File", "FileReader",
          "FileWriter", "FileInputStream", "FileOutputStream",
          "ObjectOutputStream", "ObjectInputStream", "PrintWriter"},
         {}},
        {14, 1, {"java.nio"}, {"Path", "Paths"}, {"Path"}},
        {14, 2, {"java.nio"},
         {"Files", "StandardOpenOption", "StandardCopyOption", "FileSystems",
          "FileVisitor", "SimpleFileVisitor", "WatchService"},
         {}},
        {15, 2, {"java.lang"}, {"StringBuilder", "StringBuffer"}, {}},
        {15, 3, {"java.util.regex"}, {"Pattern", "Matcher"}, {}},
        {16, 1, {"java.lang", "java.util.concurrent"},
         {"Runnable", "Callable", "Thread", "ExecutorService",
          "ScheduledExecutorService", "Executor", "Executors", "ThreadFactory",
          "CompletionService", "ThreadLocal"},
         {"Executor"}},
        {16, 2, {"java.util.concurrent.atomic"},
         {"AtomicInteger", "AtomicLong", "AtomicBoolean", "AtomicReference",
          "AtomicIntegerArray", "AtomicLongArray", "AtomicReferenceArray",
          "LongAdder", "DoubleAdder", "AtomicStampedReference",
          "AtomicMarkableReference"},
         {}},
        {16, 3, {"java.util.concurrent"},
         {"ConcurrentHashMap", "ConcurrentMap", "ConcurrentNavigableMap",
          "ConcurrentSkipListMap", "ConcurrentSkipListSet",
          "CopyOnWriteArrayList", "CopyOnWriteArraySet", "CyclicBarrier",
          "CountDownLatch", "Semaphore", "Exchanger", "Phaser",
          "BlockingQueue", "BlockingDeque", "ArrayBlockingQueue",
          "LinkedBlockingQueue", "LinkedBlockingDeque", "ConcurrentLinkedQueue",
          "ConcurrentLinkedDeque", "DelayQueue", "SynchronousQueue",
          "PriorityBlockingQueue", "Future", "FutureTask", "CompletableFuture",
          "TimeUnit", "ReentrantLock", "ReentrantReadWriteLock",
          "ReadWriteLock", "StampedLock", "Lock", "Condition"},
         {"Lock", "Condition"}},
        {16, 4, {"java.util.concurrent"},
         {"ForkJoinPool", "ForkJoinTask", "RecursiveTask", "RecursiveAction",
          "ForkJoinWorkerThread", "CountedCompleter"},
         {}},
        {17, 1, {"java.sql", "javax.sql"},
         {"PreparedStatement", "CallableStatement", "ResultSet",
          "DriverManager", "SQLException", "ResultSetMetaData",
          "DatabaseMetaData", "DataSource", "RowSet", "SQLWarning",
          "Connection", "Statement", "Driver"},
         {"Connection", "Statement", "Driver", "DataSource"}},
        {18, 1, {"java.util"}, {"Locale"}, {}},
        {18, 2, {"java.util"},
         {"ResourceBundle", "ListResourceBundle", "PropertyResourceBundle",
          "MissingResourceException"},
         {}},
        {19, 2, {"javax.persistence"},
         {"EntityManager", "EntityManagerFactory", "EntityTransaction",
          "Persistence", "PersistenceException"},
         {}},
        {19, 3, {"javax.persistence"}, {"TypedQuery", "Query"}, {"Query"}},
        {20, 1, {"javax.ejb"},
         {"SessionContext", "EJBException", "EJBContext", "EJBHome",
          "EJBObject"},
         {}},
        {20, 2, {"javax.ejb"},
         {"TimerService", "TimerHandle", "ScheduleExpression", "Timer"},
         {"Timer"}},
        {21, 1, {"javax.jms"},
         {"MessageListener", "MessageProducer", "MessageConsumer",
          "QueueSender", "QueueReceiver", "QueueSession", "TopicPublisher",
          "TopicSubscriber", "TopicSession", "TextMessage", "MapMessage",
          "BytesMessage", "ObjectMessage", "StreamMessage", "JMSException",
          "ConnectionFactory", "QueueConnectionFactory",
          "TopicConnectionFactory", "JMSContext", "MessageDrivenContext",
          "QueueConnection", "TopicConnection", "DeliveryMode", "Message",
          "Session", "Queue", "Topic", "Connection", "Destination"},
         {"Message", "Session", "Queue", "Topic", "Connection", "Destination"}},
        {21, 2, {"javax.jms"},
         {"XAConnection", "XASession", "XAConnectionFactory",
          "XAQueueConnection", "XATopicConnection",
          "TransactionRolledBackException", "TransactionInProgressException"},
         {}},
        {22, 1, {"javax.xml.soap", "javax.xml.ws"},
         {"SOAPMessage", "SOAPBody", "SOAPEnvelope", "SOAPElement",
          "SOAPFault", "SOAPConnection", "Dispatch", "BindingProvider"},
         {}},
        {22, 2, {"javax.xml.bind"},
         {"JAXBContext", "Marshaller", "Unmarshaller", "JAXBElement",
          "JAXBException", "DatatypeConverter"},
         {}},
        {23, 1, {"javax.servlet"},
         {"HttpServlet", "GenericServlet", "ServletException",
          "UnavailableException"},
         {}},
        {23, 2, {"javax.servlet"},
         {"HttpServletRequest", "HttpServletResponse", "HttpSession", "Cookie",
          "ServletRequest", "ServletResponse", "ServletInputStream",
          "ServletOutputStream", "RequestDispatcher"},
         {"Cookie"}},
        {23, 3, {"javax.servlet"},
         {"FilterChain", "FilterConfig", "ServletConfig", "ServletContext",
          "ServletContextListener", "ServletContextEvent",
          "HttpSessionListener", "HttpSessionEvent", "Filter"},
         {"Filter"}},
        {24, 2, {"javax.ws.rs"},
         {"WebTarget", "UriInfo", "UriBuilder", "MediaType", "ClientBuilder",
          "Invocation", "StreamingOutput", "MultivaluedMap", "Response",
          "Client", "Entity"},
         {"Response", "Client", "Entity"}},
        {25, 1, {"javax.websocket"},
         {"WebSocketContainer", "EndpointConfig", "ServerEndpointConfig",
          "ContainerProvider", "CloseReason", "Endpoint", "Session"},
         {"Endpoint", "Session"}},
        {25, 2, {"javax.websocket"},
         {"RemoteEndpoint", "MessageHandler", "EncodeException",
          "DecodeException", "Encoder", "Decoder"},
         {"Encoder", "Decoder"}},
        {26, 1, {"javax.faces"},
         {"FacesContext", "UIComponent", "UIComponentBase", "UIViewRoot",
          "ExternalContext", "ViewHandler"},
         {}},
        {26, 2, {"javax.faces"}, {"FacesMessage"}, {}},
        {26, 3, {"javax.el", "javax.faces.el"},
         {"ELContext", "ExpressionFactory", "ValueExpression",
          "MethodExpression", "ELResolver", "ELException"},
         {}},
        {27, 1, {"javax.enterprise", "javax.inject"},
         {"BeanManager", "InjectionPoint", "CreationalContext", "Instance",
          "Event"},
         {"Instance", "Event"}},
        {28, 1, {"javax.batch"},
         {"JobOperator", "BatchRuntime", "ItemReader", "ItemWriter",
          "ItemProcessor", "AbstractItemReader", "AbstractItemWriter",
          "AbstractBatchlet", "Batchlet", "JobContext", "StepContext",
          "JobExecution", "StepExecution", "ItemReadListener", "ChunkListener",
          "JobListener"},
         {}},
    };
    return g;
}

const std::vector<ApiGroup>& static_qualifier_groups() {
    static const std::vector<ApiGroup> g = {
        {10, 3, {"java.util"}, {"Optional"}, {}},
        {12, 1, {"java.time"}, {"LocalDate", "LocalTime", "LocalDateTime"}, {}},
        {12, 2, {"java.time"},
         {"ZonedDateTime", "OffsetDateTime", "ZoneId", "ZoneOffset"}, {}},
        {12, 3, {"java.time"}, {"Instant", "Period", "Duration", "ChronoUnit"}, {}},
        {12, 4, {"java.time"}, {"DateTimeFormatter"}, {}},
        {14, 1, {"java.nio"}, {"Paths"}, {}},
        {14, 2, {"java.nio"}, {"Files"}, {}},
        {15, 3, {"java.util.regex"}, {"Pattern"}, {}},
        {16, 1, {"java.util.concurrent"}, {"Executors"}, {}},
        {17, 2, {"java.sql"}, {"DriverManager"}, {}},
        {18, 1, {"java.util"}, {"Locale"}, {}},
        {18, 2, {"java.util"}, {"ResourceBundle"}, {}},
        {19, 2, {"javax.persistence"}, {"Persistence"}, {}},
    };
    return g;
}

const std::vector<ApiGroup>& annotation_groups() {
    static const std::vector<ApiGroup> g = {
        {6, 3, {"java.lang"}, {"Override"}, {}},
        {19, 1, {"javax.persistence"},
         {"Entity", "Table", "Id", "Column", "GeneratedValue", "OneToMany",
          "ManyToOne", "OneToOne", "ManyToMany", "JoinColumn", "JoinTable",
          "Embeddable", "Embedded", "EmbeddedId", "MappedSuperclass",
          "Transient", "Basic", "Lob", "Temporal", "Enumerated", "Version",
          "NamedQuery", "NamedQueries", "DiscriminatorColumn",
          "DiscriminatorValue", "SequenceGenerator", "TableGenerator"},
         {}},
        {19, 2, {"javax.persistence"}, {"PersistenceContext", "PersistenceUnit"}, {}},
        {20, 1, {"javax.ejb", "javax.annotation"},
         {"Stateless", "Stateful", "Singleton", "EJB", "EJBs", "Asynchronous",
          "Local", "Remote", "Interceptors", "AroundInvoke", "PostConstruct",
          "PreDestroy", "TransactionAttribute", "TransactionManagement"},
         {}},
        {20, 2, {"javax.ejb"}, {"Schedule", "Schedules", "Timeout"}, {}},
        {21, 1, {"javax.jms"}, {"MessageDriven", "JMSDestinationDefinition"}, {}},
        {22, 1, {"javax.jws"},
         {"WebService", "WebMethod", "WebParam", "WebResult", "WebServiceRef",
          "SOAPBinding", "WebFault", "Oneway"},
         {}},
        {22, 2, {"javax.xml.bind.annotation"},
         {"XmlRootElement", "XmlElement", "XmlAttribute", "XmlAccessorType",
          "XmlType", "XmlTransient", "XmlValue", "XmlSeeAlso", "XmlEnum",
          "XmlSchema"},
         {}},
        {23, 1, {"javax.servlet.annotation"}, {"WebServlet"}, {}},
        {23, 3, {"javax.servlet.annotation"},
         {"WebFilter", "WebListener", "WebInitParam"}, {}},
        {24, 1, {"javax.ws.rs"},
         {"GET", "POST", "PUT", "DELETE", "HEAD", "OPTIONS", "PATCH",
          "Produces", "Consumes", "ApplicationPath"},
         {}},
        {24, 2, {"javax.ws.rs"},
         {"Path", "PathParam", "QueryParam", "FormParam", "HeaderParam",
          "CookieParam", "MatrixParam", "DefaultValue", "Context"},
         {}},
        {25, 1, {"javax.websocket"},
         {"ServerEndpoint", "ClientEndpoint", "OnOpen", "OnClose", "OnError"},
         {}},
        {25, 2, {"javax.websocket"}, {"OnMessage"}, {}},
        {26, 1, {"javax.faces"},
         {"ManagedBean", "FacesComponent", "FacesConverter", "FacesValidator",
          "FacesBehavior", "ManagedProperty", "ViewScoped"},
         {}},
        {27, 1, {"javax.enterprise", "javax.inject"},
         {"Inject", "Named", "Qualifier", "Disposes", "Observes",
          "ApplicationScoped", "RequestScoped", "SessionScoped",
          "ConversationScoped", "Dependent", "Alternative", "Specializes",
          "Stereotype", "Vetoed", "Typed", "Produces"},
         {"Produces"}},
        {28, 1, {"javax.batch"}, {"BatchProperty"}, {}},
    };
    return g;
}

struct InvocationGroup {
    int ku;
    int cap;
    std::set<std::string> names;
};

const std::vector<InvocationGroup>& invocation_groups() {
    static const std::vector<InvocationGroup> g = {
        {8, 4, {"forEach"}},
        {10, 1, {"peek", "map", "mapToInt", "mapToLong", "mapToDouble", "mapToObj"}},
        {10, 2, {"findFirst", "findAny", "anyMatch", "allMatch", "noneMatch"}},
        {10, 4, {"stream", "parallelStream", "reduce"}},
        {10, 5, {"sorted"}},
        {10, 6, {"collect"}},
        {10, 7, {"flatMap", "flatMapToInt", "flatMapToLong", "flatMapToDouble"}},
        {15, 1, {"substring", "split", "charAt", "startsWith", "endsWith",
                 "trim", "toUpperCase", "toLowerCase", "concat"}},
        {15, 4, {"printf"}},
        {17, 2, {"executeQuery", "executeUpdate", "prepareStatement",
                 "createStatement", "prepareCall", "executeBatch"}},
        {19, 3, {"createQuery", "createNamedQuery", "createNativeQuery"}},
        {21, 2, {"getTransacted"}},
        {23, 2, {"getParameter", "getParameterValues", "getParameterNames",
                 "getHeader", "setHeader", "addHeader", "addCookie",
                 "getCookies", "getSession"}},
        {26, 2, {"addMessage"}},
    };
    return g;
}

const std::set<std::string>& servlet_handler_names() {
    static const std::set<std::string> names = {
        "doGet", "doPost", "doPut", "doDelete", "doHead", "doOptions",
        "doTrace"};
    return names;
}

std::string decapitalize(std::string s) {
    if (!s.empty()) s[0] = static_cast<char>(std::tolower(s[0]));
    return s;
}

// Dotted name for NameExpr / FieldAccess-over-names chains, else "".
std::string expr_name(const Node& n) {
    if (n.kind == NodeKind::NameExpr) return n.text;
    if (n.kind == NodeKind::FieldAccess && n.child(0)) {
        std::string base = expr_name(*n.child(0));
        if (base.empty()) return "";
        return base + "." + n.text;
    }
    return "";
}

class Detector {
public:
    Detector(const SyntaxTree& tree, const TypeOriginTable& origins,
             const DetectorConfig& cfg)
        : tree_(tree), origins_(origins), cfg_(cfg),
          imports_(TypeOriginTable::imports_of(tree)) {
        for (const auto& r : all_rules()) by_id_[{r.ku, r.cap}] = &r;
        if (const Node* p = tree.root->first(NodeKind::PackageDecl))
            package_ = p->text;
    }

    FileDetection run() {
        if (tree_.root) visit(*tree_.root);
        FileDetection out;
        out.trace = std::move(trace_);
        out.vector = out.trace.to_vector();
        return out;
    }

private:
    const SyntaxTree& tree_;
    const TypeOriginTable& origins_;
    DetectorConfig cfg_;
    FileImports imports_;
    std::string package_;
    std::map<std::pair<int, int>, const CapabilityRule*> by_id_;
    DetectionTrace trace_;
    std::vector<const Node*> type_stack_;  // enclosing named type decls

    void hit(int ku, int cap, const Node& n) {
        const CapabilityRule* r = by_id_.at({ku, cap});
        trace_.hits.push_back({r, n.span.begin, n.span.end, n.span.line_begin});
    }

    bool api_match(const ApiGroup& g, const std::string& raw_name) const {
        std::string simple = last_segment(raw_name);
        bool listed = g.names.count(simple) > 0;
        if (!listed) return false;
        std::string qualified = raw_name.find('.') != std::string::npos
                                    ? raw_name
                                    : origins_.qualified_of(simple, imports_);
        if (!qualified.empty()) {
            for (const auto& p : g.prefixes)
                if (qualified == p + "." + simple ||
                    qualified.rfind(p + ".", 0) == 0)
                    return true;
            return false;
        }
        if (!cfg_.match_unresolved_api_names) return false;
        return g.guarded.count(simple) == 0;
    }

    // ---- per-type-body analyses ----------------------------------------

    // Return type node of a method: the first unflagged type child before
    // the parameter list.
    static const Node* return_type_of(const Node& method) {
        for (const auto& c : method.children) {
            if ((c->kind == NodeKind::NamedType ||
                 c->kind == NodeKind::PrimitiveType ||
                 c->kind == NodeKind::ArrayType) &&
                !c->has_flag((1u << 28) | (1u << 29) | (1u << 30)))
                return c.get();
            if (c->kind == NodeKind::Parameter) break;
        }
        return nullptr;
    }

    std::string qualified_name_of(const Node& type) const {
        std::string q = package_;
        for (const Node* t : type_stack_) {
            if (!q.empty()) q += ".";
            q += t->text;
        }
        if (!q.empty()) q += ".";
        return q + type.text;
    }

    // Signature lookup across project-local supertypes of `qualified`.
    bool supertype_declares(const std::string& qualified,
                            const std::string& method, int arity,
                            std::set<std::string>& visited, int depth) const {
        if (depth > 32) return false;
        const java::DeclaredTypeInfo* info = origins_.type_info(qualified);
        if (!info) return false;
        const FileImports* fi = origins_.imports_of_file(info->file);
        if (!fi) return false;
        std::vector<std::string> supers = info->extends;
        supers.insert(supers.end(), info->implements.begin(),
                      info->implements.end());
        for (const std::string& s : supers) {
            std::string sq = origins_.resolve_declared(s, *fi);
            if (sq.empty() || visited.count(sq)) continue;
            visited.insert(sq);
            const java::DeclaredTypeInfo* si = origins_.type_info(sq);
            if (si && si->inheritable_sigs.count({method, arity})) return true;
            if (supertype_declares(sq, method, arity, visited, depth + 1))
                return true;
        }
        return false;
    }

    void analyze_type_body(const Node& type) {
        // direct members only; nested types get their own pass
        std::vector<const Node*> methods, ctors, fields;
        for (const auto& c : type.children) {
            if (c->kind == NodeKind::MethodDecl) methods.push_back(c.get());
            if (c->kind == NodeKind::ConstructorDecl) ctors.push_back(c.get());
            if (c->kind == NodeKind::FieldDecl) fields.push_back(c.get());
        }
        // K5.C3 overload groups
        std::map<std::string, int> name_count;
        for (const Node* m : methods) ++name_count[m->text];
        for (const Node* m : methods)
            if (name_count[m->text] >= 2) hit(5, 3, *m);
        if (ctors.size() >= 2)
            for (const Node* c : ctors) hit(5, 3, *c);

        // private fields of this type
        std::set<std::string> private_fields, all_fields;
        for (const Node* f : fields) {
            for (const auto& c : f->children) {
                if (c->kind != NodeKind::VariableDeclarator) continue;
                all_fields.insert(c->text);
                if (f->has_flag(java::kFlagPrivate)) private_fields.insert(c->text);
            }
        }

        // K5.C7 getters/setters over private fields
        for (const Node* m : methods) {
            int arity = 0;
            for (const auto& p : m->children)
                if (p->kind == NodeKind::Parameter) ++arity;
            const std::string& name = m->text;
            std::string prop;
            bool getter = false, setter = false;
            if (name.rfind("get", 0) == 0 && name.size() > 3 && arity == 0) {
                prop = decapitalize(name.substr(3));
                getter = true;
            } else if (name.rfind("is", 0) == 0 && name.size() > 2 && arity == 0) {
                prop = decapitalize(name.substr(2));
                getter = true;
            } else if (name.rfind("set", 0) == 0 && name.size() > 3 && arity == 1) {
                prop = decapitalize(name.substr(3));
                setter = true;
            }
            if ((getter || setter) && private_fields.count(prop)) hit(5, 7, *m);
        }

        bool is_class = type.kind == NodeKind::ClassDecl;

        // K5.C8 immutable pattern
        if (is_class && type.has_flag(java::kFlagFinal) && !private_fields.empty()) {
            bool ctor_assigns = false;
            for (const Node* c : ctors) {
                walk(*c, [&](const Node& n) {
                    if (n.kind == NodeKind::Assignment && n.child(0)) {
                        const Node& lhs = *n.child(0);
                        std::string target;
                        if (lhs.kind == NodeKind::NameExpr) target = lhs.text;
                        if (lhs.kind == NodeKind::FieldAccess && lhs.child(0) &&
                            lhs.child(0)->kind == NodeKind::ThisExpr)
                            target = lhs.text;
                        if (!target.empty() && private_fields.count(target))
                            ctor_assigns = true;
                    }
                    return true;
                });
            }
            if (ctor_assigns) hit(5, 8, type);
        }

        // K7.C4 singleton pattern
        if (is_class) {
            bool private_ctor = false;
            for (const Node* c : ctors)
                if (c->has_flag(java::kFlagPrivate)) private_ctor = true;
            bool self_static = false;
            for (const Node* f : fields) {
                if (!f->has_flag(java::kFlagStatic)) continue;
                for (const auto& c : f->children)
                    if (c->kind == NodeKind::NamedType &&
                        last_segment(c->text) == type.text)
                        self_static = true;
            }
            for (const Node* m : methods) {
                if (!m->has_flag(java::kFlagStatic)) continue;
                if (const Node* ret = return_type_of(*m))
                    if (ret->kind == NodeKind::NamedType &&
                        last_segment(ret->text) == type.text)
                        self_static = true;
            }
            if (private_ctor && self_static) hit(7, 4, type);
        }

        // K11.C4 custom exception / AutoCloseable types
        {
            auto ends_with = [](const std::string& s, const char* suf) {
                std::string_view v(suf);
                return s.size() >= v.size() &&
                       s.compare(s.size() - v.size(), v.size(), v) == 0;
            };
            bool exceptionish = ends_with(type.text, "Exception") ||
                                ends_with(type.text, "Error");
            for (const auto& c : type.children) {
                if (c->kind != NodeKind::NamedType) continue;
                std::string simple = last_segment(c->text);
                if (c->has_flag(1u << 30) &&
                    (ends_with(simple, "Exception") || ends_with(simple, "Error") ||
                     simple == "Throwable"))
                    exceptionish = true;
                if (c->has_flag(1u << 29) &&
                    (simple == "AutoCloseable" || simple == "Closeable"))
                    exceptionish = true;
            }
            if (exceptionish) hit(11, 4, type);
        }

        // K6.C3 by signature against project-local supertypes, only for
        // methods that do not already carry @Override.
        std::string qualified = qualified_name_of(type);
        for (const Node* m : methods) {
            bool has_override = false;
            for (const auto& c : m->children)
                if (c->kind == NodeKind::Annotation &&
                    last_segment(c->text) == "Override")
                    has_override = true;
            if (has_override) continue;
            int arity = 0;
            for (const auto& p : m->children)
                if (p->kind == NodeKind::Parameter) ++arity;
            std::set<std::string> visited;
            if (supertype_declares(qualified, m->text, arity, visited, 0))
                hit(6, 3, *m);
        }
    }

    // ---- main dispatch ---------------------------------------------------

    void visit(const Node& n) {
        dispatch(n);
        bool named_type = java::is_type_decl(n.kind);
        if (named_type) type_stack_.push_back(&n);
        for (const auto& c : n.children) visit_child(n, *c);
        if (named_type) type_stack_.pop_back();
    }

    void visit_child(const Node& parent, const Node& c) {
        parent_ = &parent;
        visit(c);
    }

    const Node* parent_ = nullptr;

    int declarator_dims(const Node& decl, const Node& var) const {
        int dims = 0;
        for (const auto& c : decl.children) {
            if (c->kind == NodeKind::ArrayType) {
                dims = static_cast<int>(c->flags & 0xFF);
                break;
            }
            if (c->kind == NodeKind::NamedType ||
                c->kind == NodeKind::PrimitiveType)
                break;
        }
        return dims + static_cast<int>((var.flags >> 24) & 0xF);
    }

    void dispatch(const Node& n) {
        const Node* p = parent_;
        switch (n.kind) {
            case NodeKind::VariableDeclarator: {
                if (n.has_flag(java::kFlagHasInit)) hit(1, 1, n);
                if (p && (p->kind == NodeKind::FieldDecl ||
                          p->kind == NodeKind::LocalVarDecl)) {
                    int dims = declarator_dims(*p, n);
                    if (dims == 1) hit(3, 1, n);
                    if (dims >= 2) hit(3, 2, n);
                    if (n.has_flag(java::kFlagHasInit)) check_polymorphic_init(*p, n);
                }
                break;
            }
            case NodeKind::CastExpr: {
                const Node* t = n.child(0);
                if (t && t->kind == NodeKind::PrimitiveType) hit(1, 1, n);
                else hit(6, 7, n);
                break;
            }
            case NodeKind::Assignment:
                hit(2, 1, n);
                break;
            case NodeKind::Postfix:
                if (n.text == "++" || n.text == "--") hit(2, 1, n);
                break;
            case NodeKind::Unary:
                if (n.text == "++" || n.text == "--") hit(2, 1, n);
                break;
            case NodeKind::Binary:
                if ((n.text == "==" || n.text == "!=") && has_string_operand(n))
                    hit(2, 2, n);
                break;
            case NodeKind::IfStmt:
            case NodeKind::Conditional:
                hit(2, 3, n);
                break;
            case NodeKind::SwitchStmt:
                hit(2, 4, n);
                break;
            case NodeKind::NewArray: {
                int dims = static_cast<int>(n.flags & 0xFF);
                if (dims == 1) hit(3, 1, n);
                if (dims >= 2) hit(3, 2, n);
                break;
            }
            case NodeKind::Parameter: {
                if (n.has_flag(java::kFlagVarargs)) hit(5, 5, n);
                int dims = 0;
                for (const auto& c : n.children)
                    if (c->kind == NodeKind::ArrayType)
                        dims = static_cast<int>(c->flags & 0xFF);
                dims += static_cast<int>((n.flags >> 24) & 0xF);
                if (dims == 1) hit(3, 1, n);
                if (dims >= 2) hit(3, 2, n);
                break;
            }
            case NodeKind::WhileStmt: hit(4, 1, n); break;
            case NodeKind::ForStmt:
            case NodeKind::EnhancedForStmt: hit(4, 2, n); break;
            case NodeKind::DoStmt: hit(4, 3, n); break;
            case NodeKind::BreakStmt: hit(4, 4, n); break;
            case NodeKind::ContinueStmt: hit(4, 5, n); break;
            case NodeKind::MethodDecl: {
                int params = 0;
                bool has_throws = false;
                for (const auto& c : n.children) {
                    if (c->kind == NodeKind::Parameter) ++params;
                    if (c->has_flag(1u << 28)) has_throws = true;
                }
                const Node* ret = return_type_of(n);
                bool returns_value =
                    ret && !(ret->kind == NodeKind::PrimitiveType &&
                             ret->text == "void");
                if (params >= 1 && returns_value) hit(5, 1, n);
                if (has_throws) hit(11, 5, n);
                if (servlet_handler_names().count(n.text)) hit(23, 1, n);
                break;
            }
            case NodeKind::ConstructorDecl: {
                for (const auto& c : n.children)
                    if (c->has_flag(1u << 28)) {
                        hit(11, 5, n);
                        break;
                    }
                break;
            }
            case NodeKind::Modifier: {
                if (n.text == "static" && p &&
                    (p->kind == NodeKind::MethodDecl ||
                     p->kind == NodeKind::FieldDecl ||
                     p->kind == NodeKind::InitializerBlock))
                    hit(5, 2, n);
                if (n.text == "public" || n.text == "private" ||
                    n.text == "protected")
                    hit(5, 6, n);
                if (n.text == "final") hit(7, 2, n);
                if (n.text == "abstract" && p &&
                    (p->kind == NodeKind::ClassDecl ||
                     p->kind == NodeKind::MethodDecl))
                    hit(6, 4, n);
                if (n.text == "synchronized") hit(16, 2, n);
                break;
            }
            case NodeKind::ThisCall: hit(5, 4, n); break;
            case NodeKind::SuperCall:
            case NodeKind::SuperExpr: hit(6, 6, n); break;
            case NodeKind::SynchronizedStmt: hit(16, 2, n); break;
            case NodeKind::TryStmt:
                hit(11, 1, n);
                if (n.first(NodeKind::ResourceList)) hit(11, 3, n);
                break;
            case NodeKind::CatchClause:
            case NodeKind::FinallyClause: hit(11, 2, n); break;
            case NodeKind::ThrowStmt: hit(11, 5, n); break;
            case NodeKind::AssertStmt: hit(11, 7, n); break;
            case NodeKind::FieldAccess: {
                if ((n.text == "out" || n.text == "err" || n.text == "in") &&
                    n.child(0) && n.child(0)->kind == NodeKind::NameExpr &&
                    n.child(0)->text == "System")
                    hit(13, 1, n);
                break;
            }
            case NodeKind::ClassDecl:
            case NodeKind::InterfaceDecl:
            case NodeKind::EnumDecl:
            case NodeKind::AnnotationDecl: {
                if (!type_stack_.empty()) hit(7, 1, n);  // nested or local
                if (n.kind == NodeKind::EnumDecl) hit(7, 3, n);
                if (n.kind == NodeKind::InterfaceDecl) hit(6, 5, n);
                if (n.first(NodeKind::TypeParameter)) hit(8, 1, n);
                analyze_type_body(n);
                break;
            }
            case NodeKind::AnonymousBody:
                hit(7, 1, n);
                break;
            case NodeKind::NewObject: {
                const Node* t = n.child(0);
                if (t && t->kind == NodeKind::NamedType &&
                    (!t->children.empty() || t->has_flag(java::kFlagDiamond)))
                    hit(8, 1, n);
                break;
            }
            case NodeKind::NamedType: {
                for (const auto& g : type_ref_groups())
                    if (api_match(g, n.text)) hit(g.ku, g.cap, n);
                if (n.has_flag(1u << 29)) hit(6, 5, n);  // implements clause
                break;
            }
            case NodeKind::Annotation: {
                for (const auto& g : annotation_groups())
                    if (api_match(g, n.text)) hit(g.ku, g.cap, n);
                break;
            }
            case NodeKind::MethodInvocation: {
                dispatch_invocation(n);
                break;
            }
            default:
                break;
        }
    }

    bool has_string_operand(const Node& n) const {
        for (const auto& c : n.children)
            if (c->kind == NodeKind::Literal &&
                c->literal == java::LiteralKind::String)
                return true;
        return false;
    }

    void check_polymorphic_init(const Node& decl, const Node& var) {
        const Node* type = nullptr;
        for (const auto& c : decl.children) {
            if (c->kind == NodeKind::NamedType) {
                type = c.get();
                break;
            }
            if (c->kind == NodeKind::PrimitiveType ||
                c->kind == NodeKind::ArrayType)
                return;
        }
        if (!type) return;
        const Node* init = var.first(NodeKind::NewObject);
        if (!init) return;
        const Node* created = init->child(0);
        if (!created || created->kind != NodeKind::NamedType) return;
        if (last_segment(type->text) != last_segment(created->text))
            hit(6, 1, var);
    }

    void dispatch_invocation(const Node& n) {
        const Node* qualifier = nullptr;
        const Node* args = nullptr;
        for (const auto& c : n.children) {
            if (c->kind == NodeKind::ArgumentList) args = c.get();
            else qualifier = c.get();
        }
        size_t argc = args ? args->children.size() : 0;

        if ((n.text == "equals" || n.text == "equalsIgnoreCase") && argc == 1)
            hit(2, 2, n);

        for (const auto& g : invocation_groups())
            if (g.names.count(n.text)) hit(g.ku, g.cap, n);

        // K6.C2: object creations passed directly as arguments
        if (args)
            for (const auto& a : args->children)
                if (a->kind == NodeKind::NewObject) hit(6, 2, *a);

        if (qualifier) {
            std::string qname = expr_name(*qualifier);
            if (!qname.empty()) {
                for (const auto& g : static_qualifier_groups())
                    if (api_match(g, qname)) hit(g.ku, g.cap, n);
                std::string qsimple = last_segment(qname);
                if (n.text == "format" && qsimple == "String") hit(15, 4, n);
                if (n.text == "console" && qsimple == "System") hit(13, 1, n);
            }
        }
    }
};

} // namespace

FileDetection detect_kus(const SyntaxTree& tree, const TypeOriginTable& origins,
                         const DetectorConfig& cfg) {
    if (!tree.root || tree.fatal) return {};
    Detector det(tree, origins, cfg);
    FileDetection out = det.run();
    // trace consistency is structural: regrouping must reproduce the vector
    assert(out.trace.to_vector() == out.vector);
    return out;
}

ReleaseDetection detect_release(const std::vector<java::SourceUnit>& units,
                                const DetectorConfig& cfg, unsigned threads) {
    if (units.empty()) throw Error("empty release: no source units");
    ReleaseDetection out;
    out.release_id = units.front().release_id;

    std::vector<SyntaxTree> trees(units.size());
    std::vector<char> failed(units.size(), 0);
    parallel_for(units.size(), [&](size_t i) {
        try {
            trees[i] = java::parse_java(units[i]);
            if (trees[i].fatal) failed[i] = 1;
        } catch (const Error&) {
            failed[i] = 1;  // unreadable input: zero row, flagged
            trees[i].path = units[i].path;
            trees[i].release_id = units[i].release_id;
        }
    }, threads);

    std::vector<const SyntaxTree*> tree_ptrs;
    for (size_t i = 0; i < trees.size(); ++i)
        if (!failed[i]) tree_ptrs.push_back(&trees[i]);
    out.origins = TypeOriginTable::build(tree_ptrs);

    out.rows.resize(units.size());
    parallel_for(units.size(), [&](size_t i) {
        FileKuRow row;
        row.path = units[i].path;
        row.parse_failed = failed[i] != 0;
        if (!failed[i])
            row.vector = detect_kus(trees[i], out.origins, cfg).vector;
        out.rows[i] = std::move(row);
    }, threads);

    std::sort(out.rows.begin(), out.rows.end(),
              [](const FileKuRow& a, const FileKuRow& b) { return a.path < b.path; });
    return out;
}

std::string release_json(const ReleaseDetection& det) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : det.rows) {
        nlohmann::json j;
        j["release"] = det.release_id;
        j["path"] = row.path;
        j["parse_failed"] = row.parse_failed;
        for (int k = 1; k <= kKuCount; ++k)
            j[ku_column_name(k)] = row.vector[static_cast<size_t>(k - 1)];
        rows.push_back(std::move(j));
    }
    return rows.dump(2) + "\n";
}

std::string release_csv(const ReleaseDetection& det) {
    std::string out = "release,path,parse_failed";
    for (int k = 1; k <= kKuCount; ++k) out += "," + ku_column_name(k);
    out += "\n";
    for (const auto& row : det.rows) {
        std::vector<std::string> fields = {det.release_id, row.path,
                                           row.parse_failed ? "1" : "0"};
        for (int k = 0; k < kKuCount; ++k)
            fields.push_back(std::to_string(row.vector[static_cast<size_t>(k)]));
        out += csv::join_row(fields);
    }
    return out;
}

} // namespace kupred::ku
