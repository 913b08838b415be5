// café résumé
int é = 0;
