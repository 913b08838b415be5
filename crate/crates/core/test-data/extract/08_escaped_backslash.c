char *path = "C:\\dir\\"; // windows path
return_path(path);
