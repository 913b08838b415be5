char *s = "oops;
// real comment
int v;
