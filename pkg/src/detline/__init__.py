"""Determinant-line calculus on lattice operators and its group cocycles."""

__all__ = [
    "graded",
    "lattice",
    "windows",
    "fredlines",
    "torus",
    "coproduct",
    "cocycle3",
    "circle",
]

__version__ = "0.1.0"
