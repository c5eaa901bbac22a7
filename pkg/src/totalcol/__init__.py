"""Algebraic total-coloring machinery over Z_p, with combinatorial cross-checks.

Small graphs are colored through a product-of-linear-factors polynomial
pipeline and every intermediate statement is checked per instance against
brute-force oracles.
"""

__version__ = "0.1.0"
