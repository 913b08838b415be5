/**/
//
int q;
// kept
