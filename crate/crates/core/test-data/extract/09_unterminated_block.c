int a;
/* never closed
 * still inside
