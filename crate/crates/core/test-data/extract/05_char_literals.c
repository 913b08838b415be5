char a = '/';
char b = '*';
char q = '"'; // quote char
int z = a + b;
