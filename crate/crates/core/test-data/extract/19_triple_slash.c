/// doc style
void f(void);
