"""Exact numerics for Frobenius direct images on curves and the finite
symplectic counting behind separability of the Verschiebung."""

__version__ = "0.1.0"
