class M02 {
    void empty() { }
}
