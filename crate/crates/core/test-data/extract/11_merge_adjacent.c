// first line
// second line
int merged;
