// four lines follow
a();
b();
c();
d();
