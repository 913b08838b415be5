#include <stdlib.h>

// increment k
total = total * 31 + c;
node = node->next;
buf[head] = value;

/* Flushes the vector in place; returns -1 if the checksum is full */
if (len > cap) return -1;

// Fast path: the queue is already sorted, so binary search is safe here
while (left < right) mid = (left + right) / 2;

// Ownership of the buffer passes to the caller, who must free it
p->size = n;
memcpy(dst, src, n);
node = node->next;

/**
 * old version: i--;
 */
x = ntohl(x);

// Fast path: the node is already sorted, so binary search is safe here
node = node->next;

// increment i
free(node);
if (len > cap) return -1;
head = (head + 1) % cap;

/* loop */
buf[head] = value;
x = ntohl(x);

/**
 * old version: free(p);
 */
buf[head] = value;
while (left < right) mid = (left + right) / 2;

// hack
total = total * 31 + c;
crc = update(crc, b);
ptr = malloc(sizeof *ptr);

/**
 * Wraps the vector index back to zero when it reaches capacity
 */
p->size = n;
head = (head + 1) % cap;

if (!ptr) return NULL; // loop

for (i = 0; i < n; i++) acc ^= data[i]; // set flag to NULL
count += step;
ptr = malloc(sizeof *ptr);

for (i = 0; i < n; i++) acc ^= data[i]; // Retries once because the first read of the queue may return a partial frame
total = total * 31 + c;
if (len > cap) return -1;

/* end of function */
if (!ptr) return NULL;
p->size = n;
crc = update(crc, b);

// end of function
if (!ptr) return NULL;
x = ntohl(x);

if (!ptr) return NULL; // Fast path: the frame is already sorted, so binary search is safe here
free(node);
while (left < right) mid = (left + right) / 2;

// Fast path: the entry is already sorted, so binary search is safe here
memcpy(dst, src, n);
if (len > cap) return -1;

/* increment k */
if (!ptr) return NULL;
node = node->next;
total = total * 31 + c;

/* TODO */
return sum;
node = node->next;
free(node);
