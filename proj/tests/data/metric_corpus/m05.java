class M05 {
    int scan(int n) {
        int hits = 0;
        for (int i = 0; i < n; i++) {
            if (i == 3) {
                continue;
            }
            while (hits < 10) {
                hits += 2;
            }
        }
        return hits;
    }
}
