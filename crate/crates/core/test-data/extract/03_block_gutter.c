/* a
 * b */
int x;
