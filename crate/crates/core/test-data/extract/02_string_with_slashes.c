char* s = "// not a comment";
int n = 1;
