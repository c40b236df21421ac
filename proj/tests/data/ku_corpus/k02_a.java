class K02a {
    void m(int x, String s) {
        int y = 0;
        y = x + 1;
        y += 2;
        y++;
        if (y > 0) { y--; } else { --y; }
        int z = y > 1 ? 1 : 0;
    }
}
