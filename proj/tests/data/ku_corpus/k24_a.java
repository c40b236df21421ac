import javax.ws.rs.GET;
import javax.ws.rs.Path;
import javax.ws.rs.Produces;
@Path("items")
class K24a {
    @GET
    @Produces("application/json")
    String list() { return "[]"; }
}
