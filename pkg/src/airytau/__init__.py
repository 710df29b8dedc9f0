"""Airy-determinant tau functions, Pade configurations and the Painleve I hierarchy."""
__version__ = "0.1.0"
