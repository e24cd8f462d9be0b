"""Polynomials in the twist symbols m and q, and quasi-polynomials in m."""
from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational

from .cyclotomic import Cyclotomic

__all__ = ["TwistPoly", "QuasiPoly"]

_ZERO = Cyclotomic.rational(0)


def _coerce_coeff(c) -> Cyclotomic:
    if isinstance(c, Cyclotomic):
        return c
    return Cyclotomic.rational(c)


class TwistPoly:
    """Sparse polynomial in m and q with cyclotomic coefficients.

    ``terms`` maps exponent pairs ``(deg_m, deg_q)`` to non-zero coefficients.
    """

    __slots__ = ("terms", "_key")

    def __init__(self, terms=None) -> None:
        clean: dict[tuple[int, int], Cyclotomic] = {}
        for mono, c in (terms or {}).items():
            c = _coerce_coeff(c)
            if not c.is_zero():
                clean[(int(mono[0]), int(mono[1]))] = c
        self.terms = clean
        self._key = None

    @classmethod
    def _raw(cls, terms: dict) -> TwistPoly:
        obj = object.__new__(cls)
        obj.terms = terms
        obj._key = None
        return obj

    @classmethod
    def constant(cls, c) -> TwistPoly:
        return cls({(0, 0): c})

    @classmethod
    def m(cls) -> TwistPoly:
        return cls({(1, 0): 1})

    @classmethod
    def q(cls) -> TwistPoly:
        return cls({(0, 1): 1})

    # -- inspection ----------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(mono == (0, 0) for mono in self.terms)

    def constant_term(self) -> Cyclotomic:
        return self.terms.get((0, 0), _ZERO)

    def coefficient(self, deg_m: int, deg_q: int = 0) -> Cyclotomic:
        return self.terms.get((deg_m, deg_q), _ZERO)

    def degree_m(self) -> int:
        """Highest power of m; -1 for the zero polynomial."""
        return max((a for a, _ in self.terms), default=-1)

    def degree_q(self) -> int:
        return max((b for _, b in self.terms), default=-1)

    def total_degree(self) -> int:
        return max((a + b for a, b in self.terms), default=-1)

    def is_rational(self) -> bool:
        return all(c.is_rational() for c in self.terms.values())

    def to_rational(self) -> TwistPoly:
        """Same polynomial with every coefficient moved to Q (order 1)."""
        return TwistPoly._raw({k: Cyclotomic.rational(c.to_fraction()) for k, c in self.terms.items()})

    def rational_terms(self) -> dict[tuple[int, int], Fraction]:
        return {k: c.to_fraction() for k, c in self.terms.items()}

    def orders(self) -> set[int]:
        return {c.order for c in self.terms.values()}

    # -- arithmetic ----------------------------------------------------

    @staticmethod
    def _lift(other) -> TwistPoly | None:
        if isinstance(other, TwistPoly):
            return other
        if isinstance(other, (int, Rational, Cyclotomic)):
            return TwistPoly.constant(other)
        return None

    def __add__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        out = dict(self.terms)
        for k, c in other.terms.items():
            s = out[k] + c if k in out else c
            if s.is_zero():
                out.pop(k, None)
            else:
                out[k] = s
        return TwistPoly._raw(out)

    __radd__ = __add__

    def __neg__(self) -> TwistPoly:
        return TwistPoly._raw({k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Rational, Cyclotomic)):
            if not other:
                return TwistPoly._raw({})
            return TwistPoly._raw({k: c * other for k, c in self.terms.items()})
        if not isinstance(other, TwistPoly):
            return NotImplemented
        out: dict[tuple[int, int], Cyclotomic] = {}
        for (a1, b1), c1 in self.terms.items():
            for (a2, b2), c2 in other.terms.items():
                k = (a1 + a2, b1 + b2)
                p = c1 * c2
                out[k] = out[k] + p if k in out else p
        return TwistPoly._raw({k: c for k, c in out.items() if not c.is_zero()})

    __rmul__ = __mul__

    def __pow__(self, e: int) -> TwistPoly:
        result = TwistPoly.constant(1)
        for _ in range(e):
            result = result * self
        return result

    def __eq__(self, other) -> bool:
        other = self._lift(other)
        if other is None:
            return NotImplemented
        return self.terms.keys() == other.terms.keys() and all(
            self.terms[k] == other.terms[k] for k in self.terms
        )

    def __hash__(self) -> int:
        if self._key is None:
            self._key = hash(frozenset((k, hash(c)) for k, c in self.terms.items()))
        return self._key

    # -- evaluation ----------------------------------------------------

    def evaluate(self, m=0, q=0) -> Cyclotomic:
        """Substitute rational values for m and q."""
        m = Fraction(m)
        q = Fraction(q)
        total = Cyclotomic.rational(0)
        for (a, b), c in self.terms.items():
            total = total + c * (m**a * q**b)
        return total

    def substitute_q(self, rate) -> TwistPoly:
        """Replace q by rate*m (rate rational), giving a polynomial in m."""
        rate = Fraction(rate)
        out = TwistPoly()
        for (a, b), c in self.terms.items():
            out = out + TwistPoly({(a + b, 0): c * rate**b})
        return out

    def substitute_m_affine(self, scale, shift) -> TwistPoly:
        """Replace m by scale*m + shift (rationals)."""
        lin = TwistPoly({(1, 0): Fraction(scale), (0, 0): Fraction(shift)})
        out = TwistPoly()
        for (a, b), c in self.terms.items():
            out = out + (lin**a) * TwistPoly({(0, b): c})
        return out

    # -- formatting ----------------------------------------------------

    def __repr__(self) -> str:
        return f"TwistPoly({self})"

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for (a, b) in sorted(self.terms, key=lambda k: (-k[0], -k[1])):
            c = self.terms[(a, b)]
            mono = "*".join(
                x for x in (
                    "" if a == 0 else ("m" if a == 1 else f"m^{a}"),
                    "" if b == 0 else ("q" if b == 1 else f"q^{b}"),
                ) if x
            )
            if c.is_rational():
                v = c.to_fraction()
                sign = "-" if v < 0 else "+"
                v = abs(v)
                if mono and v == 1:
                    body = mono
                elif mono:
                    body = f"{v}*{mono}"
                else:
                    body = str(v)
            else:
                sign = "+"
                body = f"{c}*{mono}" if mono else str(c)
            parts.append((sign, body))
        first_sign, first_body = parts[0]
        text = ("-" if first_sign == "-" else "") + first_body
        for sign, body in parts[1:]:
            text += f" {sign} {body}"
        return text


class QuasiPoly:
    """A quasi-polynomial in m: branch r applies when m = r (mod period)."""

    __slots__ = ("period", "branches")

    def __init__(self, branches) -> None:
        branches = tuple(b if isinstance(b, TwistPoly) else TwistPoly.constant(b) for b in branches)
        if not branches:
            raise ValueError("quasi-polynomial needs at least one branch")
        period = len(branches)
        # collapse to the smallest period that reproduces every branch
        for d in sorted(d for d in range(1, period + 1) if period % d == 0):
            if all(branches[r] == branches[r % d] for r in range(period)):
                branches = branches[:d]
                break
        self.period = len(branches)
        self.branches = branches

    @classmethod
    def from_poly(cls, p: TwistPoly) -> QuasiPoly:
        return cls((p,))

    def branch(self, m: int) -> TwistPoly:
        return self.branches[m % self.period]

    def evaluate(self, m: int, q=0) -> Cyclotomic:
        return self.branch(m).evaluate(m, q)

    def is_polynomial(self) -> bool:
        return self.period == 1

    def as_poly(self) -> TwistPoly:
        if self.period != 1:
            raise ValueError(f"quasi-polynomial has period {self.period}")
        return self.branches[0]

    def degree_m(self) -> int:
        return max(b.degree_m() for b in self.branches)

    def total_degree(self) -> int:
        return max(b.total_degree() for b in self.branches)

    def is_rational(self) -> bool:
        return all(b.is_rational() for b in self.branches)

    def to_rational(self) -> QuasiPoly:
        return QuasiPoly(b.to_rational() for b in self.branches)

    def _spread(self, period: int) -> tuple[TwistPoly, ...]:
        return tuple(self.branches[r % self.period] for r in range(period))

    @staticmethod
    def _lift(other) -> QuasiPoly | None:
        if isinstance(other, QuasiPoly):
            return other
        if isinstance(other, TwistPoly):
            return QuasiPoly((other,))
        if isinstance(other, (int, Rational, Cyclotomic)):
            return QuasiPoly((TwistPoly.constant(other),))
        return None

    def __add__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        n = math.lcm(self.period, other.period)
        return QuasiPoly(a + b for a, b in zip(self._spread(n), other._spread(n)))

    __radd__ = __add__

    def __neg__(self) -> QuasiPoly:
        return QuasiPoly(-b for b in self.branches)

    def __sub__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __mul__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        n = math.lcm(self.period, other.period)
        return QuasiPoly(a * b for a, b in zip(self._spread(n), other._spread(n)))

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        other = self._lift(other)
        if other is None:
            return NotImplemented
        n = math.lcm(self.period, other.period)
        return self._spread(n) == other._spread(n)

    def __hash__(self) -> int:
        return hash(self.branches)

    def __repr__(self) -> str:
        return f"QuasiPoly(period={self.period}, {[str(b) for b in self.branches]})"

    def __str__(self) -> str:
        if self.period == 1:
            return str(self.branches[0])
        rows = [f"m = {r} mod {self.period}: {b}" for r, b in enumerate(self.branches)]
        return "\n".join(rows)
