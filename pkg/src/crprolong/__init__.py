"""Symbolic toolkit for almost complex structures, CR frames and jet prolongation."""

__version__ = "0.1.0"
