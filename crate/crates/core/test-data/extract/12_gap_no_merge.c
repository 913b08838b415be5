// a

// b
int x;
