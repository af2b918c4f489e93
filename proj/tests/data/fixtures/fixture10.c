typedef struct Point {
    int x;
    int y;
} Point;

int manhattan(Point *a, Point *b) {
    int dx = a->x - b->x;
    int dy = a->y - b->y;
    if (dx < 0) {
        dx = -dx;
    }
    if (dy < 0) {
        dy = -dy;
    }
    return dx + dy;
}
