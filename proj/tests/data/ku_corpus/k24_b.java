import javax.ws.rs.QueryParam;
import javax.ws.rs.core.Response;
class K24b {
    Response find(@QueryParam("q") String q) {
        Response r = Response.ok(q).build();
        return r;
    }
}
