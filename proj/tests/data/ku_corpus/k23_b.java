import javax.servlet.FilterChain;
import javax.servlet.annotation.WebFilter;
import javax.servlet.http.Cookie;
@WebFilter("/x")
class K23b {
    void pass(FilterChain chain, Cookie cookie) { }
}
