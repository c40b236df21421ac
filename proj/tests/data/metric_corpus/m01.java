class M01 {}
