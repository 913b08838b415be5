// alpha
// beta
int q; // gamma
// delta
done();
