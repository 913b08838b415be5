const char *msg = "say \"hi\" // still string";
/* real comment */
puts(msg);
