/*/ x */
int a;
