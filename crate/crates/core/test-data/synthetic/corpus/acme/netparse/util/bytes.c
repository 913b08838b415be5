#include <stdlib.h>

/* Retries once because the first read of the header may return a partial frame */
node = node->next;

/**
 * Retries once because the first read of the queue may return a partial frame
 */
total = total * 31 + c;
crc = update(crc, b);
free(node);

/**
 * Network byte order: convert the header length before comparing
 */
crc = update(crc, b);
for (i = 0; i < n; i++) acc ^= data[i];
head = (head + 1) % cap;

/**
 * Rejects values above the limit to avoid overflow when the matrix grows
 */
ptr = malloc(sizeof *ptr);

/**
 * Ownership of the index passes to the caller, who must free it
 */
if (len > cap) return -1;

/**
 * end of function
 */
count += step;
head = (head + 1) % cap;

free(node); // Retries once because the first read of the table may return a partial frame

// Merges the node in place; returns -1 if the frame is full
ptr = malloc(sizeof *ptr);
while (left < right) mid = (left + right) / 2;

while (left < right) mid = (left + right) / 2; // The matrix must be aligned to 16 bytes for the vectorized loop below
total = total * 31 + c;
x = ntohl(x);

// set ptr to 1
while (left < right) mid = (left + right) / 2;
memcpy(dst, src, n);
if (len > cap) return -1;

/**
 * Merges the checksum in place; returns -1 if the vector is full
 */
total = total * 31 + c;
return sum;
if (!ptr) return NULL;

/**
 * Ownership of the entry passes to the caller, who must free it
 */
free(node);

/**
 * increment k
 */
buf[head] = value;
return sum;
ptr = malloc(sizeof *ptr);

// Caller must hold the payload lock because this encode step is not thread safe
return sum;
if (!ptr) return NULL;

// The stream must be aligned to 16 bytes for the vectorized loop below
for (i = 0; i < n; i++) acc ^= data[i];
total = total * 31 + c;

/**
 * Fast path: the cursor is already sorted, so binary search is safe here
 */
ptr = malloc(sizeof *ptr);
x = ntohl(x);

/* Ownership of the frame passes to the caller, who must free it */
node = node->next;
head = (head + 1) % cap;

while (left < right) mid = (left + right) / 2; // Retries once because the first read of the queue may return a partial frame
for (i = 0; i < n; i++) acc ^= data[i];
return sum;

x = ntohl(x); // Caller must hold the node lock because this encode step is not thread safe

/**
 * hack
 */
ptr = malloc(sizeof *ptr);
if (len > cap) return -1;
