"""Sector data model and the chartwise Kawasaki fixed-point engine.

A presentation is a flat list of sectors.  Each sector is one fixed locus
U^g of one group element (or an aggregated conjugacy class) with its
chart weight already folded into ``prefactor``.  The Euler characteristic
of E (x) L^m (x) L'^-q is the sum of the sector integrals

    prefactor * int_{U^g} tr_g(E) e^{m c1(L)} e^{-q c1(L')} Td(T U^g)
                / prod_theta (1 - e^{-2 pi i theta} e^{-c1(N_theta)})
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import lru_cache

from .algebra import (
    Cyclotomic,
    GradedClass,
    QuasiPoly,
    TwistPoly,
    denominator_factor,
    exp_twist,
    integrate,
    invert,
    root_of_unity,
    todd_from_roots,
)

__all__ = [
    "FiberPiece",
    "InvariantViolation",
    "NormalSummand",
    "OrbifoldPresentation",
    "PresentationError",
    "Sector",
    "disjoint_union",
    "evaluate_at",
    "identity_chi",
    "is_conjugate_closed",
    "rigidify",
    "sector_chi",
    "sector_contribution",
    "total_chi",
    "twisted_chi",
    "with_trivial_gerbe",
]


class PresentationError(ValueError):
    """Sector data that violates the presentation invariants."""


class InvariantViolation(RuntimeError):
    """A computed result broke a structural invariant (degree bound, rationality)."""


def _check_theta(theta: Fraction) -> None:
    if not 0 < theta < 1:
        raise ValueError(
            "rotation angle must lie in (0,1); θ=0 belongs to the tangent, not normal, directions"
        )


@dataclass(frozen=True)
class NormalSummand:
    """Normal line with c1 = c1_coeff * H on which g acts by exp(2 pi i theta)."""

    c1_coeff: Fraction
    theta: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "c1_coeff", Fraction(self.c1_coeff))
        object.__setattr__(self, "theta", Fraction(self.theta))
        _check_theta(self.theta)

    def conjugate(self) -> NormalSummand:
        return NormalSummand(self.c1_coeff, 1 - self.theta)


@dataclass(frozen=True)
class FiberPiece:
    """Rank-one piece of the bundle on a fixed locus.

    ``character`` is the trace of g on the piece.  A non-zero
    ``character_m_weight`` w multiplies it by zeta_order^(w*m), where
    ``order`` is the group order of the sector carrying the piece.
    """

    c1_coeff: Fraction
    character: Cyclotomic = field(default_factory=lambda: Cyclotomic.rational(1))
    character_m_weight: int = 0
    multiplicity: int = 1

    def __post_init__(self) -> None:
        object.__setattr__(self, "c1_coeff", Fraction(self.c1_coeff))
        if not isinstance(self.character, Cyclotomic):
            object.__setattr__(self, "character", Cyclotomic.rational(self.character))

    def conjugate(self, order: int) -> FiberPiece:
        return FiberPiece(
            self.c1_coeff,
            self.character.conj(),
            (-self.character_m_weight) % order if order > 1 else 0,
            self.multiplicity,
        )


def _fractions(xs) -> tuple[Fraction, ...]:
    return tuple(Fraction(x) for x in xs)


@dataclass(frozen=True)
class Sector:
    label: str = field(compare=False)
    dim: int
    fundamental_degree: Fraction
    prefactor: Fraction
    group_order: int = 1
    tangent_roots_plus: tuple[Fraction, ...] = ()
    tangent_roots_minus: tuple[Fraction, ...] = ()
    normals: tuple[NormalSummand, ...] = ()
    bundle: tuple[FiberPiece, ...] = ()
    ample_coeff: Fraction = Fraction(0)
    q_coeff: Fraction | None = None
    component: int = 0

    def __post_init__(self) -> None:
        set_ = object.__setattr__
        set_(self, "fundamental_degree", Fraction(self.fundamental_degree))
        set_(self, "prefactor", Fraction(self.prefactor))
        set_(self, "tangent_roots_plus", _fractions(self.tangent_roots_plus))
        set_(self, "tangent_roots_minus", _fractions(self.tangent_roots_minus))
        set_(self, "normals", tuple(self.normals))
        set_(self, "bundle", tuple(self.bundle))
        set_(self, "ample_coeff", Fraction(self.ample_coeff))
        if self.q_coeff is not None:
            set_(self, "q_coeff", Fraction(self.q_coeff))
        if self.dim < 0 or self.group_order < 1:
            raise PresentationError(f"sector {self.label!r}: bad dim/group order")

    @property
    def is_identity(self) -> bool:
        return self.group_order == 1

    @property
    def q_twist(self) -> Fraction:
        return self.ample_coeff if self.q_coeff is None else self.q_coeff

    @property
    def m_periodic(self) -> bool:
        """True when some fiber character depends on m modulo the group order."""
        return any(p.character_m_weight % self.group_order for p in self.bundle)

    def rank(self) -> int:
        return sum(p.multiplicity for p in self.bundle)

    def conjugate(self) -> Sector:
        return replace(
            self,
            normals=tuple(n.conjugate() for n in self.normals),
            bundle=tuple(p.conjugate(self.group_order) for p in self.bundle),
        )

    def signature(self):
        return (
            self.component,
            self.dim,
            self.fundamental_degree,
            self.prefactor,
            self.group_order,
            tuple(sorted(self.tangent_roots_plus)),
            tuple(sorted(self.tangent_roots_minus)),
            tuple(sorted((n.c1_coeff, n.theta) for n in self.normals)),
            frozenset(Counter(self.bundle).items()),
            self.ample_coeff,
            self.q_twist,
        )


@dataclass(frozen=True)
class OrbifoldPresentation:
    name: str
    ambient_dim: int
    sectors: tuple[Sector, ...]
    generic_stab: int = 1
    component_stabs: tuple[int, ...] = ()
    self_conjugate: bool = True
    coarse_ample_degree: Fraction | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "sectors", tuple(self.sectors))
        if self.coarse_ample_degree is not None:
            object.__setattr__(self, "coarse_ample_degree", Fraction(self.coarse_ample_degree))
        if not self.component_stabs and self.sectors:
            object.__setattr__(self, "component_stabs", (self.generic_stab,))

    @property
    def identity_sectors(self) -> tuple[Sector, ...]:
        return tuple(s for s in self.sectors if s.is_identity)

    @property
    def twisted_sectors(self) -> tuple[Sector, ...]:
        return tuple(s for s in self.sectors if not s.is_identity)

    def rank(self) -> int:
        ids = self.identity_sectors
        return ids[0].rank() if ids else 0

    def validate(self) -> OrbifoldPresentation:
        n = self.ambient_dim
        for s in self.sectors:
            if s.dim > n:
                raise PresentationError(f"sector {s.label!r} has dim {s.dim} > {n}")
            if s.component >= len(self.component_stabs):
                raise PresentationError(f"sector {s.label!r} refers to unknown component")
            if s.is_identity and s.normals:
                raise PresentationError(f"identity sector {s.label!r} has normal directions")
            if not s.is_identity and s.dim > n - 1:
                raise PresentationError(
                    f"twisted sector {s.label!r} has dim {s.dim} > n-1 = {n - 1}"
                )
        for c, stab in enumerate(self.component_stabs):
            total = sum(
                (s.prefactor for s in self.identity_sectors if s.component == c), Fraction(0)
            )
            if total != Fraction(1, stab):
                raise PresentationError(
                    f"component {c}: identity prefactors sum to {total}, expected 1/{stab}"
                )
        if self.self_conjugate and not is_conjugate_closed(self):
            raise PresentationError("sector set is not closed under g -> g^-1")
        return self


def is_conjugate_closed(p: OrbifoldPresentation) -> bool:
    before = Counter(s.signature() for s in p.sectors)
    after = Counter(s.conjugate().signature() for s in p.sectors)
    return before == after


# -- sector integrals --------------------------------------------------------


@lru_cache(maxsize=1 << 16)
def _contribution(sector: Sector, symbols: str, residue: int | None) -> TwistPoly:
    d = sector.dim
    comps = [Cyclotomic.rational(0)] * (d + 1)
    for piece in sector.bundle:
        char = piece.character * piece.multiplicity
        w = piece.character_m_weight % sector.group_order
        if w:
            if residue is None:
                raise ValueError(
                    f"sector {sector.label!r} has m-dependent characters; evaluate per residue"
                )
            char = char * root_of_unity(sector.group_order, w * residue)
        c = piece.c1_coeff
        for i in range(d + 1):
            comps[i] = comps[i] + char * (c**i / math.factorial(i))
    if all(c.is_zero() for c in comps):
        return TwistPoly()
    value = GradedClass(d, comps)
    if "m" in symbols and sector.ample_coeff:
        value = value * exp_twist(sector.ample_coeff, "m", 1, d)
    if "q" in symbols and sector.q_twist:
        value = value * exp_twist(sector.q_twist, "q", -1, d)
    value = value * todd_from_roots(sector.tangent_roots_plus, sector.tangent_roots_minus, d)
    if sector.normals:
        denom = GradedClass.one(d)
        for nrm in sector.normals:
            denom = denom * denominator_factor(nrm.theta, nrm.c1_coeff, d)
        value = value * invert(denom)
    return integrate(value, sector.fundamental_degree) * sector.prefactor


def sector_contribution(sector: Sector, symbols: str = "mq", residue: int | None = None) -> TwistPoly:
    """One summand of the fixed-point formula as a polynomial in m, q.

    ``symbols`` selects which twists are kept formal ("mq", "m", "q" or "").
    Sectors with m-dependent characters need ``residue`` = m mod group order.
    """
    return _contribution(sector, symbols, residue)


def sector_chi(sector: Sector, symbols: str = "mq") -> TwistPoly | QuasiPoly:
    if not sector.m_periodic:
        return _contribution(sector, symbols, None)
    return QuasiPoly(_contribution(sector, symbols, r) for r in range(sector.group_order))


def _exact_sum(polys) -> TwistPoly:
    # sum within each coefficient field first; Galois-closed groups become rational
    buckets: dict[int, TwistPoly] = {}
    for p in polys:
        if p.is_zero():
            continue
        key = math.lcm(*p.orders()) if p.terms else 1
        buckets[key] = buckets[key] + p if key in buckets else p
    total = TwistPoly()
    for key in sorted(buckets):
        part = buckets[key]
        if key > 1 and part.is_rational():
            part = part.to_rational()
        total = total + part
    if total.is_rational():
        total = total.to_rational()
    return total


def _checked(p: OrbifoldPresentation, sector: Sector, value: TwistPoly) -> TwistPoly:
    deg = value.degree_m()
    bound = sector.dim if sector.is_identity else min(sector.dim, p.ambient_dim - 1)
    if deg > bound:
        raise InvariantViolation(
            f"twisted sector exceeds degree bound: {sector.label!r} has deg_m {deg} > {bound}"
        )
    return value


def _period(sectors) -> int:
    return math.lcm(1, *(s.group_order for s in sectors if s.m_periodic))


def _sum_sectors(p: OrbifoldPresentation, sectors, symbols: str) -> TwistPoly | QuasiPoly:
    sectors = tuple(sectors)
    period = _period(sectors)
    if period == 1:
        return _exact_sum(_checked(p, s, _contribution(s, symbols, None)) for s in sectors)
    fixed = _exact_sum(
        _checked(p, s, _contribution(s, symbols, None)) for s in sectors if not s.m_periodic
    )
    branches = []
    for r in range(period):
        moving = _exact_sum(
            _checked(p, s, _contribution(s, symbols, r % s.group_order))
            for s in sectors
            if s.m_periodic
        )
        branches.append(_exact_sum([fixed, moving]))
    return QuasiPoly(branches)


def _require_rational(p: OrbifoldPresentation, chi):
    if p.self_conjugate and not chi.is_rational():
        raise InvariantViolation("sector set inconsistent: conjugate sectors do not cancel")
    return chi


def total_chi(p: OrbifoldPresentation, symbols: str = "mq") -> TwistPoly | QuasiPoly:
    """Sum of every sector contribution.

    Returns a TwistPoly, or a QuasiPoly in m when fiber characters depend
    on m; its period is the lcm of the orders of those sectors.
    """
    return _require_rational(p, _sum_sectors(p, p.sectors, symbols))


def identity_chi(p: OrbifoldPresentation, symbols: str = "mq") -> TwistPoly | QuasiPoly:
    return _sum_sectors(p, p.identity_sectors, symbols)


def twisted_chi(p: OrbifoldPresentation, symbols: str = "mq") -> TwistPoly | QuasiPoly:
    chi = total_chi(p, symbols) - identity_chi(p, symbols)
    if chi.degree_m() > p.ambient_dim - 1:
        raise InvariantViolation("twisted sector exceeds degree bound")
    return chi


def evaluate_at(chi, m: int = 0, q: int = 0) -> Fraction:
    """Exact value of a (quasi-)polynomial at integers m, q."""
    if isinstance(chi, (int, Fraction)):
        return Fraction(chi)
    return chi.evaluate(m, q).to_fraction()


# -- presentation transforms -------------------------------------------------


def with_trivial_gerbe(p: OrbifoldPresentation, band: int) -> OrbifoldPresentation:
    """Decorate every component with a trivially acting generic stabilizer of order ``band``.

    The band is folded into the 1/s normalization of the integrals: all
    prefactors are divided by ``band`` and no extra sectors are added.
    """
    if band < 1:
        raise ValueError("gerbe band order must be positive")
    return replace(
        p,
        name=f"{p.name} x B(Z/{band})",
        sectors=tuple(replace(s, prefactor=s.prefactor / band) for s in p.sectors),
        generic_stab=p.generic_stab * band,
        component_stabs=tuple(s * band for s in p.component_stabs),
    )


def rigidify(p: OrbifoldPresentation) -> OrbifoldPresentation:
    """Remove the generic stabilizer of every component (s -> 1)."""
    stabs = p.component_stabs
    for c, stab in enumerate(stabs):
        total = sum((s.prefactor for s in p.identity_sectors if s.component == c), Fraction(0))
        if total != Fraction(1, stab):
            raise PresentationError("presentation is not a trivial gerbe over its rigidification")
    if all(s == 1 for s in stabs):
        return p
    return replace(
        p,
        name=f"{p.name} (rigidified)",
        sectors=tuple(replace(s, prefactor=s.prefactor * stabs[s.component]) for s in p.sectors),
        generic_stab=1,
        component_stabs=(1,) * len(stabs),
    )


def disjoint_union(ps) -> OrbifoldPresentation:
    ps = list(ps)
    if not ps:
        raise ValueError("disjoint union of nothing")
    dims = {p.ambient_dim for p in ps}
    if len(dims) != 1:
        raise ValueError(f"components have different dimensions {sorted(dims)}")
    sectors: list[Sector] = []
    stabs: list[int] = []
    for p in ps:
        offset = len(stabs)
        sectors.extend(replace(s, component=s.component + offset) for s in p.sectors)
        stabs.extend(p.component_stabs)
    degrees = [p.coarse_ample_degree for p in ps if p.sectors]
    coarse = sum(degrees, Fraction(0)) if all(d is not None for d in degrees) else None
    names = [p.name for p in ps if p.sectors] or [ps[0].name]
    return OrbifoldPresentation(
        name=" + ".join(names),
        ambient_dim=dims.pop(),
        sectors=tuple(sectors),
        generic_stab=math.lcm(1, *stabs),
        component_stabs=tuple(stabs),
        self_conjugate=all(p.self_conjugate for p in ps),
        coarse_ample_degree=coarse,
    )
