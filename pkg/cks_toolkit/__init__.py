"""Growth-function calculus for nuclear function spaces: Legendre transforms, weight sequences and condition checks."""

__version__ = "0.1.0"
