"""Pairwise image correlation and correlation clustering of key-point annotated images."""

__version__ = "0.1.0"
