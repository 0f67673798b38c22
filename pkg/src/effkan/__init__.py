"""Effective, symmetric effective and degenerate-preferring Kan fibrations
on truncated finite simplicial sets."""

__version__ = "0.1.0"
