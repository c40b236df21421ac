import javax.enterprise.context.ApplicationScoped;
import javax.enterprise.event.Event;
import javax.enterprise.event.Observes;
@ApplicationScoped
class K27b {
    Event<String> bus;
    void onPing(@Observes String ping) { }
}
