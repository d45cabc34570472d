"""Definite quadratic lattices over F_q[t].

Reduction and successive minima, representation numbers, local (genus)
invariants, theta series, Gauss sums over F_q and isometry testing, plus a
batch harness that checks that ternary definite forms are determined by
their representation numbers.
"""

__version__ = "0.1.0"
