class K16a {
    synchronized void tick() { }
    void run() {
        Thread t = new Thread(new Runnable() {
            public void run() { }
        });
        synchronized (this) { }
    }
}
