"""Exact-arithmetic toolkit certifying rootlessness of rational polynomials.

Subpackages cover finite-field trace/norm scans, rational polynomial
arithmetic, central simple algebras of prime degree, local-global splitting
analysis, class-field data over Q, the recursive no-root criterion for monic
polynomials of degree <= 4, and a positive-existential formula builder.
"""

__version__ = "0.1.0"
