"""Desk-scale construction and verification of divergence examples for degree-k dispersive maximal estimates."""

__version__ = "0.1.0"
