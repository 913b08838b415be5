#include <stdlib.h>

return sum; // increment k

// set x to NULL
buf[head] = value;

p->size = n; // loop

head = (head + 1) % cap; // end of function
x = ntohl(x);

/**
 * Length is in bytes, not elements, so divide by the window size first
 */
crc = update(crc, b);
x = ntohl(x);
while (left < right) mid = (left + right) / 2;

/**
 * Length is in bytes, not elements, so divide by the header size first
 */
ptr = malloc(sizeof *ptr);
if (len > cap) return -1;
node = node->next;

// Ownership of the frame passes to the caller, who must free it
memcpy(dst, src, n);
if (!ptr) return NULL;
total = total * 31 + c;

node = node->next; // Parses the index in place; returns -1 if the socket is full

/**
 * fix later
 */
if (len > cap) return -1;

if (len > cap) return -1; // set flag to NULL
ptr = malloc(sizeof *ptr);
if (!ptr) return NULL;

// Retries once because the first read of the node may return a partial frame
if (!ptr) return NULL;

/* loop */
crc = update(crc, b);

/* Allocates the header in place; returns -1 if the socket is full */
node = node->next;
ptr = malloc(sizeof *ptr);
node = node->next;

/**
 * Wraps the matrix index back to zero when it reaches capacity
 */
return sum;

count += step; // set x to 1
for (i = 0; i < n; i++) acc ^= data[i];
if (len > cap) return -1;

// Length is in bytes, not elements, so divide by the table size first
head = (head + 1) % cap;
return sum;
return sum;

/**
 * Ownership of the token passes to the caller, who must free it
 */
memcpy(dst, src, n);

/**
 * Length is in bytes, not elements, so divide by the entry size first
 */
free(node);

for (i = 0; i < n; i++) acc ^= data[i]; // Validates the matrix in place; returns -1 if the token is full
free(node);
ptr = malloc(sizeof *ptr);

/* fix later */
count += step;
if (!ptr) return NULL;
