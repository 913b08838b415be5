#if 0
/* disabled */
#endif
