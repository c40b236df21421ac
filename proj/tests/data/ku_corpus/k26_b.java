import javax.faces.application.FacesMessage;
import javax.faces.context.FacesContext;
class K26b {
    void warn(FacesContext ctx, String text) {
        FacesMessage m = new FacesMessage(text);
        ctx.addMessage(null, m);
    }
}
