"""Exact workbench for Shalika germs and affine Springer fiber stratifications."""

__version__ = "0.1.0"
