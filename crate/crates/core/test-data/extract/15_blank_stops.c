/* doc */
first();

second();
