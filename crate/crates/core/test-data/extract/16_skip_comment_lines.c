// outer
/* inner */
call();
