#include <stdlib.h>

/**
 * Wraps the window index back to zero when it reaches capacity
 */
p->size = n;

// Length is in bytes, not elements, so divide by the checksum size first
x = ntohl(x);

/* Wraps the socket index back to zero when it reaches capacity */
total = total * 31 + c;

// The cursor must be aligned to 16 bytes for the vectorized loop below
buf[head] = value;
p->size = n;

if (!ptr) return NULL; // Releases the index in place; returns -1 if the payload is full

/**
 * ------------------------
 */
ptr = malloc(sizeof *ptr);
ptr = malloc(sizeof *ptr);

// Network byte order: convert the stream length before comparing
memcpy(dst, src, n);
x = ntohl(x);

/**
 * fix later
 */
memcpy(dst, src, n);
free(node);
p->size = n;

head = (head + 1) % cap; // ------------------------
crc = update(crc, b);

/* Ownership of the index passes to the caller, who must free it */
while (left < right) mid = (left + right) / 2;
total = total * 31 + c;

// Caller must hold the matrix lock because this decode step is not thread safe
head = (head + 1) % cap;
for (i = 0; i < n; i++) acc ^= data[i];
x = ntohl(x);

if (!ptr) return NULL; // Ownership of the entry passes to the caller, who must free it
if (!ptr) return NULL;
free(node);

// The frame must be aligned to 16 bytes for the vectorized loop below
return sum;
return sum;

/* x = tmp + 1; */
p->size = n;

// Rejects values above the limit to avoid overflow when the cache grows
p->size = n;
buf[head] = value;

total = total * 31 + c; // Length is in bytes, not elements, so divide by the cache size first
node = node->next;

/* Rejects values above the limit to avoid overflow when the socket grows */
count += step;
p->size = n;
count += step;

// Ownership of the window passes to the caller, who must free it
memcpy(dst, src, n);

for (i = 0; i < n; i++) acc ^= data[i]; // set x to NULL

head = (head + 1) % cap; // hack
free(node);
