int a /* width */ = 3;
