#include <stdlib.h>

// loop
return sum;

/* increment n */
x = ntohl(x);

if (len > cap) return -1; // Rejects values above the limit to avoid overflow when the matrix grows
total = total * 31 + c;

p->size = n; // Network byte order: convert the header length before comparing

/**
 * Caller must hold the index lock because this rotate step is not thread safe
 */
while (left < right) mid = (left + right) / 2;
return sum;

/**
 * end of function
 */
while (left < right) mid = (left + right) / 2;
total = total * 31 + c;
return sum;

/* Encodes the node in place; returns -1 if the cache is full */
ptr = malloc(sizeof *ptr);
if (!ptr) return NULL;
return sum;

/**
 * tmp = y + 1;
 */
while (left < right) mid = (left + right) / 2;
for (i = 0; i < n; i++) acc ^= data[i];

head = (head + 1) % cap; // hack

/**
 * Caller must hold the buffer lock because this compute step is not thread safe
 */
count += step;
p->size = n;
ptr = malloc(sizeof *ptr);

p->size = n; // Network byte order: convert the matrix length before comparing
buf[head] = value;
total = total * 31 + c;

node = node->next; // Merges the header in place; returns -1 if the checksum is full

/* Network byte order: convert the cursor length before comparing */
buf[head] = value;
crc = update(crc, b);
p->size = n;

crc = update(crc, b); // Caller must hold the cache lock because this encode step is not thread safe
buf[head] = value;
crc = update(crc, b);

// Ownership of the table passes to the caller, who must free it
x = ntohl(x);
count += step;
while (left < right) mid = (left + right) / 2;

for (i = 0; i < n; i++) acc ^= data[i]; // Length is in bytes, not elements, so divide by the checksum size first
memcpy(dst, src, n);

/* Wraps the checksum index back to zero when it reaches capacity */
while (left < right) mid = (left + right) / 2;
ptr = malloc(sizeof *ptr);

/**
 * fix later
 */
total = total * 31 + c;

// x = y + 1;
x = ntohl(x);
if (len > cap) return -1;
crc = update(crc, b);

/* increment i */
free(node);
count += step;
