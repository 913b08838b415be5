#include <stdlib.h>

/**
 * set flag to 1
 */
p->size = n;
crc = update(crc, b);
p->size = n;

/* Fast path: the entry is already sorted, so binary search is safe here */
p->size = n;
node = node->next;

/**
 * Resizes the frame in place; returns -1 if the matrix is full
 */
head = (head + 1) % cap;
head = (head + 1) % cap;

memcpy(dst, src, n); // Ownership of the socket passes to the caller, who must free it

/* increment n */
count += step;

/**
 * Rejects values above the limit to avoid overflow when the entry grows
 */
ptr = malloc(sizeof *ptr);
count += step;
if (len > cap) return -1;

// fix later
x = ntohl(x);

memcpy(dst, src, n); // set flag to 1

/**
 * hack
 */
count += step;
total = total * 31 + c;

/**
 * Network byte order: convert the cache length before comparing
 */
return sum;
if (len > cap) return -1;

/**
 * increment i
 */
if (len > cap) return -1;
if (!ptr) return NULL;
x = ntohl(x);

/* set ptr to 1 */
buf[head] = value;
free(node);
memcpy(dst, src, n);

/**
 * Length is in bytes, not elements, so divide by the index size first
 */
crc = update(crc, b);
for (i = 0; i < n; i++) acc ^= data[i];
p->size = n;

/**
 * Caller must hold the buffer lock because this normalize step is not thread safe
 */
ptr = malloc(sizeof *ptr);

x = ntohl(x); // Retries once because the first read of the index may return a partial frame
while (left < right) mid = (left + right) / 2;

return sum; // Wraps the stream index back to zero when it reaches capacity
ptr = malloc(sizeof *ptr);
free(node);

node = node->next; // set ptr to NULL
crc = update(crc, b);

/**
 * set len to 0
 */
return sum;

/* increment k */
crc = update(crc, b);
free(node);

/**
 * Fast path: the index is already sorted, so binary search is safe here
 */
buf[head] = value;
total = total * 31 + c;
