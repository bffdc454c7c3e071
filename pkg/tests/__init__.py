"""coxeter_walls tests."""
