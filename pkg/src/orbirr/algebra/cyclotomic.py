"""Exact arithmetic in cyclotomic fields Q(zeta_N).

Elements are stored as coefficient vectors in the power basis
1, zeta, ..., zeta^(phi(N)-1), always reduced modulo the N-th cyclotomic
polynomial, so equality inside one field is a plain tuple comparison.
Binary operations between different fields embed both operands into
Q(zeta_lcm) first.
"""
from __future__ import annotations

import cmath
import math
from fractions import Fraction
from functools import lru_cache
from numbers import Rational

__all__ = [
    "Cyclotomic",
    "cyclotomic_polynomial",
    "root_of_unity",
    "totient",
]


def totient(n: int) -> int:
    result = n
    p = 2
    k = n
    while p * p <= k:
        if k % p == 0:
            while k % p == 0:
                k //= p
            result -= result // p
        p += 1
    if k > 1:
        result -= result // k
    return result


def _mobius(n: int) -> int:
    sign = 1
    p = 2
    while p * p <= n:
        if n % p == 0:
            n //= p
            if n % p == 0:
                return 0
            sign = -sign
        p += 1
    if n > 1:
        sign = -sign
    return sign


def _poly_divexact(num: list[int], den: list[int]) -> list[int]:
    # den is monic; exact division of integer polynomials (low -> high)
    num = list(num)
    out = [0] * (len(num) - len(den) + 1)
    for i in range(len(out) - 1, -1, -1):
        c = num[i + len(den) - 1]
        out[i] = c
        if c:
            for j, d in enumerate(den):
                num[i + j] -= c * d
    if any(num[: len(den) - 1]):
        raise ArithmeticError("inexact polynomial division")
    return out


@lru_cache(maxsize=None)
def cyclotomic_polynomial(n: int) -> tuple[int, ...]:
    """Integer coefficients of Phi_n, lowest degree first."""
    if n < 1:
        raise ValueError("cyclotomic order must be positive")
    poly = [-1] + [0] * (n - 1) + [1]
    for d in range(1, n):
        if n % d == 0:
            poly = _poly_divexact(poly, list(cyclotomic_polynomial(d)))
    return tuple(poly)


@lru_cache(maxsize=None)
def _power_table(n: int) -> tuple[tuple[int, ...], ...]:
    """zeta_n^i reduced mod Phi_n for i = 0..n-1 (integer coefficients)."""
    phi = cyclotomic_polynomial(n)
    deg = len(phi) - 1
    table = []
    cur = [1] + [0] * (deg - 1) if deg > 0 else []
    for _ in range(n):
        table.append(tuple(cur))
        # multiply by zeta: shift, then fold the overflow coefficient back
        top = cur[-1]
        cur = [0] + cur[:-1]
        if top:
            cur = [c - top * phi[i] for i, c in enumerate(cur)]
    return tuple(table)


@lru_cache(maxsize=None)
def _normalized_traces(n: int) -> tuple[Fraction, ...]:
    # Tr(zeta^i) / phi(n); independent of the ambient field, used for hashing
    out = []
    for i in range(totient(n)):
        d = n // math.gcd(i, n)
        out.append(Fraction(_mobius(d), totient(d)))
    return tuple(out)


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    return Fraction(x)


class Cyclotomic:
    """An element of Q(zeta_N), zeta_N = exp(2*pi*i/N)."""

    __slots__ = ("order", "coeffs", "_hash")

    def __init__(self, order: int, coeffs) -> None:
        coeffs = tuple(_as_fraction(c) for c in coeffs)
        deg = totient(order)
        if len(coeffs) < deg:
            coeffs = coeffs + (Fraction(0),) * (deg - len(coeffs))
        elif len(coeffs) > deg:
            coeffs = _reduce(order, coeffs)
        self.order = order
        self.coeffs = coeffs
        self._hash = None

    @classmethod
    def _raw(cls, order: int, coeffs: tuple[Fraction, ...]) -> Cyclotomic:
        obj = object.__new__(cls)
        obj.order = order
        obj.coeffs = coeffs
        obj._hash = None
        return obj

    @classmethod
    def rational(cls, value) -> Cyclotomic:
        return cls._raw(1, (_as_fraction(value),))

    @classmethod
    def from_powers(cls, order: int, powers: dict[int, object]) -> Cyclotomic:
        """Build sum(c * zeta_order**e) from an exponent -> coefficient map."""
        table = _power_table(order)
        acc = [Fraction(0)] * totient(order)
        for e, c in powers.items():
            c = _as_fraction(c)
            if not c:
                continue
            for i, t in enumerate(table[e % order]):
                if t:
                    acc[i] += c * t
        return cls._raw(order, tuple(acc))

    # -- structure -----------------------------------------------------

    def is_rational(self) -> bool:
        return not any(self.coeffs[1:])

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def to_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self!r} is not rational")
        return self.coeffs[0]

    def embed(self, order: int) -> Cyclotomic:
        """Image in Q(zeta_order); order must be a multiple of self.order."""
        if order == self.order:
            return self
        if order % self.order:
            raise ValueError(f"Q(zeta_{self.order}) does not embed in Q(zeta_{order})")
        step = order // self.order
        if self.is_rational():
            return Cyclotomic._raw(order, (self.coeffs[0],) + (Fraction(0),) * (totient(order) - 1))
        return Cyclotomic.from_powers(order, {i * step: c for i, c in enumerate(self.coeffs) if c})

    def galois(self, a: int) -> Cyclotomic:
        """Apply the automorphism zeta -> zeta**a (a coprime to the order)."""
        if math.gcd(a, self.order) != 1:
            raise ValueError("Galois exponent must be a unit")
        if self.is_rational():
            return self
        return Cyclotomic.from_powers(self.order, {i * a: c for i, c in enumerate(self.coeffs) if c})

    def conj(self) -> Cyclotomic:
        return self.galois(-1 % self.order) if self.order > 1 else self

    def inverse(self) -> Cyclotomic:
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero cyclotomic number")
        if self.is_rational():
            return Cyclotomic.rational(1 / self.coeffs[0])
        # x^-1 = (prod of the other conjugates) / norm(x)
        others = Cyclotomic.rational(1)
        for a in range(2, self.order):
            if math.gcd(a, self.order) == 1:
                others = others * self.galois(a)
        norm = (self * others).to_fraction()
        return others * Cyclotomic.rational(1 / norm)

    def normalized_trace(self) -> Fraction:
        return sum(
            (c * t for c, t in zip(self.coeffs, _normalized_traces(self.order)) if c),
            Fraction(0),
        )

    # -- arithmetic ----------------------------------------------------

    def _common(self, other) -> tuple[Cyclotomic, Cyclotomic] | None:
        if not isinstance(other, Cyclotomic):
            if isinstance(other, (int, Rational)):
                other = Cyclotomic.rational(other)
            else:
                return None
        if self.order == other.order:
            return self, other
        if other.order == 1:
            return self, other.embed(self.order)
        if self.order == 1:
            return self.embed(other.order), other
        n = math.lcm(self.order, other.order)
        return self.embed(n), other.embed(n)

    def __add__(self, other):
        pair = self._common(other)
        if pair is None:
            return NotImplemented
        a, b = pair
        return Cyclotomic._raw(a.order, tuple(x + y for x, y in zip(a.coeffs, b.coeffs)))

    __radd__ = __add__

    def __neg__(self) -> Cyclotomic:
        return Cyclotomic._raw(self.order, tuple(-c for c in self.coeffs))

    def __sub__(self, other):
        pair = self._common(other)
        if pair is None:
            return NotImplemented
        a, b = pair
        return Cyclotomic._raw(a.order, tuple(x - y for x, y in zip(a.coeffs, b.coeffs)))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                return Cyclotomic._raw(self.order, (Fraction(0),) * len(self.coeffs))
            return Cyclotomic._raw(self.order, tuple(c * other for c in self.coeffs))
        pair = self._common(other)
        if pair is None:
            return NotImplemented
        a, b = pair
        if a.order == 1:
            return Cyclotomic._raw(1, (a.coeffs[0] * b.coeffs[0],))
        if b.is_rational():
            s = b.coeffs[0]
            return Cyclotomic._raw(a.order, tuple(c * s for c in a.coeffs))
        if a.is_rational():
            s = a.coeffs[0]
            return Cyclotomic._raw(a.order, tuple(c * s for c in b.coeffs))
        prod = [Fraction(0)] * (2 * len(a.coeffs) - 1)
        for i, x in enumerate(a.coeffs):
            if x:
                for j, y in enumerate(b.coeffs):
                    if y:
                        prod[i + j] += x * y
        return Cyclotomic._raw(a.order, _reduce(a.order, prod))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * (1 / Fraction(other))
        if isinstance(other, Cyclotomic):
            return self * other.inverse()
        return NotImplemented

    def __rtruediv__(self, other):
        return Cyclotomic.rational(other) * self.inverse()

    def __pow__(self, e: int) -> Cyclotomic:
        if e < 0:
            return self.inverse() ** (-e)
        result = Cyclotomic.rational(1)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __eq__(self, other) -> bool:
        pair = self._common(other)
        if pair is None:
            return NotImplemented
        a, b = pair
        return a.coeffs == b.coeffs

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self.normalized_trace())
        return self._hash

    def __bool__(self) -> bool:
        return not self.is_zero()

    def __complex__(self) -> complex:
        z = cmath.exp(2j * cmath.pi / self.order)
        return sum((float(c) * z**i for i, c in enumerate(self.coeffs)), 0j)

    def __repr__(self) -> str:
        return f"Cyclotomic({self.order}, {[str(c) for c in self.coeffs]})"

    def __str__(self) -> str:
        if self.is_rational():
            return str(self.coeffs[0])
        parts = []
        for i, c in enumerate(self.coeffs):
            if not c:
                continue
            mono = "" if i == 0 else (f"z{self.order}" if i == 1 else f"z{self.order}^{i}")
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{c}*{mono}")
        return "(" + " + ".join(parts).replace("+ -", "- ") + ")"


def _reduce(order: int, coeffs) -> tuple[Fraction, ...]:
    deg = totient(order)
    out = list(coeffs[:deg]) + [Fraction(0)] * max(0, deg - len(coeffs))
    table = _power_table(order)
    for e in range(deg, len(coeffs)):
        c = coeffs[e]
        if c:
            for i, t in enumerate(table[e % order]):
                if t:
                    out[i] += c * t
    return tuple(out)


def root_of_unity(n: int, j: int) -> Cyclotomic:
    """zeta_n ** j, reduced modulo Phi_n."""
    if n < 1:
        raise ValueError("root of unity order must be positive")
    return Cyclotomic.from_powers(n, {j % n: 1})
