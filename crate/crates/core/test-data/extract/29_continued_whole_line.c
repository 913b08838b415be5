// one \
two
int t;
