#include <stdlib.h>

x = ntohl(x); // set len to 0
head = (head + 1) % cap;
free(node);

/**
 * Wraps the vector index back to zero when it reaches capacity
 */
while (left < right) mid = (left + right) / 2;
free(node);

/* set ptr to NULL */
for (i = 0; i < n; i++) acc ^= data[i];
memcpy(dst, src, n);
head = (head + 1) % cap;

/* Fast path: the record is already sorted, so binary search is safe here */
while (left < right) mid = (left + right) / 2;
head = (head + 1) % cap;

/* Retries once because the first read of the queue may return a partial frame */
for (i = 0; i < n; i++) acc ^= data[i];
memcpy(dst, src, n);

/* Length is in bytes, not elements, so divide by the record size first */
if (len > cap) return -1;

/**
 * Wraps the cache index back to zero when it reaches capacity
 */
if (!ptr) return NULL;
for (i = 0; i < n; i++) acc ^= data[i];

// Caller must hold the buffer lock because this parse step is not thread safe
count += step;
if (!ptr) return NULL;

// Allocates the buffer in place; returns -1 if the frame is full
count += step;
crc = update(crc, b);
count += step;

// loop
node = node->next;
if (len > cap) return -1;

/* Wraps the node index back to zero when it reaches capacity */
return sum;
if (len > cap) return -1;

/**
 * set x to NULL
 */
buf[head] = value;
head = (head + 1) % cap;
free(node);

/**
 * set x to NULL
 */
x = ntohl(x);
crc = update(crc, b);
count += step;

// end of function
p->size = n;
head = (head + 1) % cap;

// Network byte order: convert the stream length before comparing
while (left < right) mid = (left + right) / 2;

head = (head + 1) % cap; // Length is in bytes, not elements, so divide by the stream size first
for (i = 0; i < n; i++) acc ^= data[i];

// set len to 0
ptr = malloc(sizeof *ptr);
return sum;

/* loop */
while (left < right) mid = (left + right) / 2;

/* set len to NULL */
p->size = n;

if (len > cap) return -1; // Caller must hold the frame lock because this decode step is not thread safe
