import javax.jms.MessageProducer;
import javax.jms.Session;
import javax.jms.TextMessage;
class K21b {
    void send(Session session, MessageProducer producer) throws Exception {
        TextMessage m = session.createTextMessage("hello");
        boolean tx = session.getTransacted();
        producer.send(m);
    }
}
