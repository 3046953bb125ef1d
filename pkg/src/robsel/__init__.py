"""Robust subset selection under a cardinality budget."""

__version__ = "0.1.0"
