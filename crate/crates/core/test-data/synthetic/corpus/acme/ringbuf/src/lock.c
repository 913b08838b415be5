#include <stdlib.h>

// end of function
node = node->next;
if (len > cap) return -1;
while (left < right) mid = (left + right) / 2;

// Caller must hold the cursor lock because this decode step is not thread safe
for (i = 0; i < n; i++) acc ^= data[i];
p->size = n;
crc = update(crc, b);

node = node->next; // tmp = tmp + 1;
node = node->next;

memcpy(dst, src, n); // Ownership of the checksum passes to the caller, who must free it
memcpy(dst, src, n);

/**
 * y = len + 1;
 */
for (i = 0; i < n; i++) acc ^= data[i];

return sum; // loop
free(node);

// Network byte order: convert the frame length before comparing
crc = update(crc, b);
head = (head + 1) % cap;
memcpy(dst, src, n);

/* ------------------------ */
p->size = n;
for (i = 0; i < n; i++) acc ^= data[i];
return sum;

/**
 * Wraps the matrix index back to zero when it reaches capacity
 */
ptr = malloc(sizeof *ptr);

total = total * 31 + c; // TODO

// Length is in bytes, not elements, so divide by the stream size first
buf[head] = value;
buf[head] = value;

// TODO
while (left < right) mid = (left + right) / 2;
x = ntohl(x);
if (!ptr) return NULL;

/* Caller must hold the token lock because this allocate step is not thread safe */
return sum;
memcpy(dst, src, n);
if (!ptr) return NULL;

memcpy(dst, src, n); // TODO

node = node->next; // loop
head = (head + 1) % cap;
head = (head + 1) % cap;

/* x = len + 1; */
buf[head] = value;

/* end of function */
p->size = n;
crc = update(crc, b);

// Fast path: the stream is already sorted, so binary search is safe here
total = total * 31 + c;

// Allocates the payload in place; returns -1 if the stream is full
p->size = n;

// TODO
if (!ptr) return NULL;
for (i = 0; i < n; i++) acc ^= data[i];
total = total * 31 + c;
