"""
cubiclin

Exact certificates for properness questions about cubic-linear maps
F_A(x) = x + (Ax)^3.
"""

__version__ = "1.0.0"
