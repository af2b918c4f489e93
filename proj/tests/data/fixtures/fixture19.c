int nested_blocks(int seed) {
    int acc = seed;
    {
        int tmp = acc * 2;
        {
            acc = tmp + 1;
        }
    }
    ;
    if (acc > 10) {
        {
            acc = acc - 10;
        }
    }
    return acc;
}
