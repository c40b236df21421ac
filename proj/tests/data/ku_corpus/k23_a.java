import javax.servlet.http.HttpServlet;
import javax.servlet.http.HttpServletRequest;
import javax.servlet.http.HttpServletResponse;
class K23a extends HttpServlet {
    protected void doGet(HttpServletRequest req, HttpServletResponse resp) {
        String q = req.getParameter("q");
    }
}
