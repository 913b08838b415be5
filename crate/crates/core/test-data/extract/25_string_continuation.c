const char *s = "first \
// not a comment";
// real
use(s);
