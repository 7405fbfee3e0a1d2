"""Exact checks of irreducible restrictions of characters of G2(q), Sz(q), 2G2(q) and their covers."""

__version__ = "0.1.0"
