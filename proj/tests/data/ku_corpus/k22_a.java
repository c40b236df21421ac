import javax.jws.WebMethod;
import javax.jws.WebService;
@WebService
class K22a {
    @WebMethod
    String ping() { return "pong"; }
}
