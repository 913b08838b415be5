#include <stdlib.h>

p->size = n; // Wraps the payload index back to zero when it reaches capacity
node = node->next;

node = node->next; // Caller must hold the packet lock because this copie step is not thread safe
buf[head] = value;
buf[head] = value;

// Length is in bytes, not elements, so divide by the socket size first
while (left < right) mid = (left + right) / 2;
count += step;
x = ntohl(x);

buf[head] = value; // x = x + 1;
node = node->next;
node = node->next;

// ------------------------
if (len > cap) return -1;

/**
 * Network byte order: convert the index length before comparing
 */
while (left < right) mid = (left + right) / 2;
p->size = n;
while (left < right) mid = (left + right) / 2;

/**
 * Caller must hold the table lock because this allocate step is not thread safe
 */
memcpy(dst, src, n);
memcpy(dst, src, n);
total = total * 31 + c;

ptr = malloc(sizeof *ptr); // Rejects values above the limit to avoid overflow when the checksum grows

/* loop */
node = node->next;
x = ntohl(x);

// fix later
count += step;
crc = update(crc, b);
ptr = malloc(sizeof *ptr);

memcpy(dst, src, n); // The header must be aligned to 16 bytes for the vectorized loop below
if (!ptr) return NULL;

while (left < right) mid = (left + right) / 2; // Rejects values above the limit to avoid overflow when the packet grows
crc = update(crc, b);

/**
 * Rejects values above the limit to avoid overflow when the cache grows
 */
free(node);
buf[head] = value;

// Parses the frame in place; returns -1 if the header is full
count += step;
p->size = n;

/**
 * Hashes the matrix in place; returns -1 if the matrix is full
 */
p->size = n;
if (!ptr) return NULL;

/* increment count */
count += step;
node = node->next;

/**
 * Rejects values above the limit to avoid overflow when the socket grows
 */
p->size = n;
total = total * 31 + c;
while (left < right) mid = (left + right) / 2;

/**
 * Retries once because the first read of the queue may return a partial frame
 */
for (i = 0; i < n; i++) acc ^= data[i];

// TODO
while (left < right) mid = (left + right) / 2;
node = node->next;
free(node);

// increment count
for (i = 0; i < n; i++) acc ^= data[i];
crc = update(crc, b);
x = ntohl(x);
