import javax.xml.bind.JAXBContext;
import javax.xml.bind.Marshaller;
import javax.xml.bind.annotation.XmlRootElement;
@XmlRootElement
class K22b {
    void out(Object o) throws Exception {
        JAXBContext ctx = JAXBContext.newInstance(K22b.class);
        Marshaller m = ctx.createMarshaller();
    }
}
