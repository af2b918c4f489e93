int in_range(double x, double lo, double hi) {
    return x >= lo && x <= hi;
}

int classify(double x) {
    if (in_range(x, 0.0, 1.0) || x > 100.0) {
        return 1;
    }
    if (!(x < 0.0) && (long)x % 2 == 0) {
        return 2;
    }
    return 3;
}
