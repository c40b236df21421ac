import javax.ejb.Asynchronous;
import javax.ejb.Stateless;
@Stateless
class K20a {
    @Asynchronous
    void fire() { }
}
