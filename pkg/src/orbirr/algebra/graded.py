"""Truncated one-generator cohomology rings Q(zeta)[m, q][H] / (H^(d+1)).

Everything here is a finite computation: H is nilpotent, so each
characteristic-class series stops at degree ``dim``.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import comb, factorial

from .cyclotomic import Cyclotomic, root_of_unity
from .twistpoly import TwistPoly

__all__ = [
    "GradedClass",
    "bernoulli",
    "ch_from_roots",
    "todd_from_roots",
    "exp_twist",
    "denominator_factor",
    "invert",
    "integrate",
]


class GradedClass:
    """Element sum_i components[i] * H^i with 0 <= i <= dim."""

    __slots__ = ("dim", "components")

    def __init__(self, dim: int, components=()) -> None:
        if dim < 0:
            raise ValueError("dimension must be non-negative")
        comps = [c if isinstance(c, TwistPoly) else TwistPoly.constant(c) for c in components]
        comps = comps[: dim + 1] + [TwistPoly()] * (dim + 1 - len(comps))
        self.dim = dim
        self.components = tuple(comps)

    @classmethod
    def one(cls, dim: int) -> GradedClass:
        return cls(dim, [1])

    @classmethod
    def zero(cls, dim: int) -> GradedClass:
        return cls(dim)

    def _check(self, other: GradedClass) -> None:
        if other.dim != self.dim:
            raise ValueError(f"dimension mismatch: {self.dim} vs {other.dim}")

    def __add__(self, other):
        if not isinstance(other, GradedClass):
            return NotImplemented
        self._check(other)
        return GradedClass(self.dim, [a + b for a, b in zip(self.components, other.components)])

    def __neg__(self) -> GradedClass:
        return GradedClass(self.dim, [-a for a in self.components])

    def __sub__(self, other):
        if not isinstance(other, GradedClass):
            return NotImplemented
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, GradedClass):
            self._check(other)
            out = [TwistPoly() for _ in range(self.dim + 1)]
            for i, a in enumerate(self.components):
                if a.is_zero():
                    continue
                for j in range(self.dim + 1 - i):
                    b = other.components[j]
                    if not b.is_zero():
                        out[i + j] = out[i + j] + a * b
            return GradedClass(self.dim, out)
        if isinstance(other, (int, Fraction, Cyclotomic, TwistPoly)):
            return GradedClass(self.dim, [a * other for a in self.components])
        return NotImplemented

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, GradedClass):
            return NotImplemented
        return self.dim == other.dim and self.components == other.components

    def __hash__(self) -> int:
        return hash((self.dim, self.components))

    def __repr__(self) -> str:
        body = " + ".join(f"({c})*H^{i}" for i, c in enumerate(self.components) if not c.is_zero())
        return f"GradedClass(dim={self.dim}: {body or '0'})"


@lru_cache(maxsize=None)
def bernoulli(k: int) -> Fraction:
    """B_k with B_1 = -1/2, from sum_{j<=k} C(k+1, j) B_j = 0."""
    if k == 0:
        return Fraction(1)
    return -sum((comb(k + 1, j) * bernoulli(j) for j in range(k)), Fraction(0)) / (k + 1)


@lru_cache(maxsize=None)
def _todd_series(d: int) -> tuple[Fraction, ...]:
    # x/(1-e^{-x}) = sum_k B_k (-x)^k / k!
    return tuple(bernoulli(k) * (-1) ** k / factorial(k) for k in range(d + 1))


@lru_cache(maxsize=None)
def _inverse_todd_series(d: int) -> tuple[Fraction, ...]:
    # (1-e^{-x})/x = sum_k (-x)^k / (k+1)!
    return tuple(Fraction((-1) ** k, factorial(k + 1)) for k in range(d + 1))


def _series_class(series, c: Fraction, dim: int) -> GradedClass:
    c = Fraction(c)
    return GradedClass(dim, [series[i] * c**i for i in range(dim + 1)])


def ch_from_roots(roots, dim: int) -> GradedClass:
    """Chern character sum_i exp(c_i H) for roots x_i = c_i H."""
    comps = [Fraction(0)] * (dim + 1)
    for c in roots:
        c = Fraction(c)
        for i in range(dim + 1):
            comps[i] += c**i / factorial(i)
    return GradedClass(dim, comps)


def todd_from_roots(roots_plus, roots_minus, dim: int) -> GradedClass:
    """Td of the virtual bundle sum(plus) - sum(minus); zero roots contribute 1."""
    out = GradedClass.one(dim)
    for c in roots_plus:
        if c:
            out = out * _series_class(_todd_series(dim), c, dim)
    for c in roots_minus:
        if c:
            out = out * _series_class(_inverse_todd_series(dim), c, dim)
    return out


def exp_twist(a, symbol: str, sign: int, dim: int) -> GradedClass:
    """exp(sign * a * symbol * H) with symbol in {"m", "q"} kept formal."""
    if symbol not in ("m", "q"):
        raise ValueError(f"unknown twist symbol {symbol!r}")
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    a = Fraction(a) * sign
    comps = []
    for j in range(dim + 1):
        mono = (j, 0) if symbol == "m" else (0, j)
        comps.append(TwistPoly({mono: a**j / factorial(j)}))
    return GradedClass(dim, comps)


def denominator_factor(theta, normal_root, dim: int) -> GradedClass:
    """The class 1 - zeta^{-1} exp(-c H) for a normal line rotated by exp(2 pi i theta)."""
    theta = Fraction(theta)
    if not 0 < theta < 1:
        raise ValueError(
            "rotation angle must lie in (0,1); θ=0 belongs to the tangent, not normal, directions"
        )
    zinv = root_of_unity(theta.denominator, -theta.numerator)
    c = Fraction(normal_root)
    comps = [Cyclotomic.rational(1) - zinv]
    for i in range(1, dim + 1):
        comps.append(zinv * (-(-c) ** i / factorial(i)))
    return GradedClass(dim, comps)


def invert(x: GradedClass) -> GradedClass:
    """Multiplicative inverse of a class whose degree-0 part is a non-zero constant."""
    head = x.components[0]
    if not head.is_constant() or head.is_zero():
        raise ValueError("non-unit graded class")
    y0 = head.constant_term().inverse()
    out = [TwistPoly.constant(y0)]
    for k in range(1, x.dim + 1):
        acc = TwistPoly()
        for i in range(1, k + 1):
            xi = x.components[i]
            if not xi.is_zero():
                acc = acc + xi * out[k - i]
        out.append(acc * (-y0))
    return GradedClass(x.dim, out)


def integrate(x: GradedClass, fundamental_degree) -> TwistPoly:
    """Top-degree component times the fundamental degree of H^dim."""
    return x.components[x.dim] * Fraction(fundamental_degree)
