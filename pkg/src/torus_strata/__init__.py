"""Characteristic data of low-dimensional locally standard torus pseudomanifolds."""
