/* spans
   two */ int after;
next();
