const char *p = "/* not a comment */";
int k; /* after string */
