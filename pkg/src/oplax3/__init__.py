"""Finite strict 3-categories, orientals, nerves and normalised oplax 3-functors."""

__version__ = "0.1.0"
