"""Computational companion for p-adic families of half-integral weight forms."""

__version__ = "0.1.0"
