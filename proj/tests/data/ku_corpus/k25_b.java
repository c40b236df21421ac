import javax.websocket.OnMessage;
import javax.websocket.RemoteEndpoint;
class K25b {
    @OnMessage
    String echo(String m) { return m; }
    void push(RemoteEndpoint remote) throws Exception {
        remote.sendText("x");
    }
}
