"""Spanning-tree embedding into G(n, p)."""
