"""Exact arithmetic: cyclotomic numbers, twist polynomials, graded classes."""
from .cyclotomic import Cyclotomic, cyclotomic_polynomial, root_of_unity, totient
from .graded import (
    GradedClass,
    bernoulli,
    ch_from_roots,
    denominator_factor,
    exp_twist,
    integrate,
    invert,
    todd_from_roots,
)
from .twistpoly import QuasiPoly, TwistPoly

__all__ = [
    "Cyclotomic",
    "GradedClass",
    "QuasiPoly",
    "TwistPoly",
    "bernoulli",
    "ch_from_roots",
    "cyclotomic_polynomial",
    "denominator_factor",
    "exp_twist",
    "integrate",
    "invert",
    "root_of_unity",
    "todd_from_roots",
    "totient",
]
