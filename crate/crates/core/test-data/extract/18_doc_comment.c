/**
 * Returns the sum.
 *
 * Overflow wraps.
 */
int sum(int a, int b);
