"""Exact checks of determinant and Pfaffian identities for weighted sums of reflections.

Modules: ``ring`` (rationals, polynomials, radicals), ``linalg`` (exact
matrices and volumes), ``commutators`` (reflections and weighted nested
commutators), ``enumeration`` (trees, DOOMBs, 3-trees, B-basic graphs and the
weighted sums over them), ``rootsystems`` (A_n, B_n, D_n) and ``harness``
(verification, calibration, reports).
"""

__version__ = "0.1.0"
