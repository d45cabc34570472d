"""Exact arithmetic: F_q, F_q[t], F_q(t), F_q((1/t)), Z[zeta_p], matrices over A."""

from .cyclotomic import CycValue, ScaledCycValue, cyc_arith
from .field import GF
from .laurent import LaurentSeries, laurent_invert
from .poly import (NEG_INF, Poly, factor, gcd, inverse_mod, is_irreducible, monic_irreducibles,
                   parse_poly, poly_divmod, powmod, valuation, xgcd)
from .polymatrix import PolyMatrix, hermite_normal_form, invariant_factors, smith_normal_form
from .ratfunc import RatFunc, as_ratfunc

__all__ = [
    "GF", "Poly", "NEG_INF", "poly_divmod", "gcd", "xgcd", "inverse_mod", "powmod",
    "is_irreducible", "monic_irreducibles", "factor", "valuation", "parse_poly",
    "RatFunc", "as_ratfunc", "LaurentSeries", "laurent_invert",
    "CycValue", "ScaledCycValue", "cyc_arith",
    "PolyMatrix", "smith_normal_form", "hermite_normal_form", "invariant_factors",
]
