x = 1; // ends */ here
