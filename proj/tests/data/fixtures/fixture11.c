unsigned long measure(void) {
    char marker = 'x';
    const char *label = "sensor";
    double scale = 2.5e3;
    float ratio = 0.25f;
    unsigned long bytes = sizeof(double) + sizeof marker;
    if (ratio > 0.1f) {
        bytes += (unsigned long)scale;
    }
    return bytes + (label[0] == marker);
}
