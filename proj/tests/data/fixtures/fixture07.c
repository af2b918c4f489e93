int find_first(const int *data, int len, int needle) {
    int i = 0;
loop:
    if (i >= len) {
        goto fail;
    }
    if (data[i] == needle) {
        return i;
    }
    i++;
    goto loop;
fail:
    return -1;
}
