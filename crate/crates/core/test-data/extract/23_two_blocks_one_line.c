/* a */ /* b */
go();
