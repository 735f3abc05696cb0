"""Extremal numbers for families of bipartite trees in bipartite host graphs."""

__version__ = "0.1.0"
