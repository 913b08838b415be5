// init counter
int c = 0;
