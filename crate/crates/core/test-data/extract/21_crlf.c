// windows
int w;
