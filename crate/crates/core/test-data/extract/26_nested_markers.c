// has /* inside
int m;
/* has // inside */
int n;
