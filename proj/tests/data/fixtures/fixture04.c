int sum_grid(int n, int m) {
    int total = 0;
    for (int i = 0; i < n; i++) {
        for (int j = 0; j < m; j++) {
            total += i * j;
        }
    }
    return total;
}
