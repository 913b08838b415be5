#include <stdlib.h>

// TODO
count += step;
while (left < right) mid = (left + right) / 2;

/**
 * Network byte order: convert the checksum length before comparing
 */
count += step;
total = total * 31 + c;
node = node->next;

/**
 * loop
 */
count += step;
memcpy(dst, src, n);
for (i = 0; i < n; i++) acc ^= data[i];

/* Fast path: the header is already sorted, so binary search is safe here */
memcpy(dst, src, n);
memcpy(dst, src, n);
count += step;

return sum; // old version: i--;
ptr = malloc(sizeof *ptr);
return sum;

x = ntohl(x); // TODO
if (len > cap) return -1;

/* ------------------------ */
while (left < right) mid = (left + right) / 2;
node = node->next;

for (i = 0; i < n; i++) acc ^= data[i]; // hack

// Retries once because the first read of the cursor may return a partial frame
buf[head] = value;
x = ntohl(x);

/* old version: free(p); */
total = total * 31 + c;

/* end of function */
buf[head] = value;
if (len > cap) return -1;

count += step; // ------------------------
total = total * 31 + c;
crc = update(crc, b);

/**
 * fix later
 */
total = total * 31 + c;
for (i = 0; i < n; i++) acc ^= data[i];
head = (head + 1) % cap;

/* tmp = len + 1; */
node = node->next;
crc = update(crc, b);
total = total * 31 + c;

/**
 * Network byte order: convert the checksum length before comparing
 */
for (i = 0; i < n; i++) acc ^= data[i];
if (!ptr) return NULL;

// Retries once because the first read of the node may return a partial frame
x = ntohl(x);

total = total * 31 + c; // Caller must hold the record lock because this resize step is not thread safe

for (i = 0; i < n; i++) acc ^= data[i]; // fix later
memcpy(dst, src, n);

memcpy(dst, src, n); // increment n
memcpy(dst, src, n);

/* Ownership of the payload passes to the caller, who must free it */
head = (head + 1) % cap;
p->size = n;
count += step;
