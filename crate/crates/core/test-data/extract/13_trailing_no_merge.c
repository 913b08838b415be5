x(); // t
// u
y();
