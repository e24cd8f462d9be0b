"""Asymptotic data read off the exact Euler characteristics.

Leading terms, slopes and degree audits work on any presentation; the
threshold report compares critical jet slopes on orbifold curves computed
from the full fixed-point sum against the identity sector alone.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction

from .algebra import QuasiPoly, TwistPoly
from .kawasaki import (
    InvariantViolation,
    OrbifoldPresentation,
    identity_chi,
    sector_chi,
    total_chi,
)
from .scenes import OrbifoldCurve, canonical_twist_curve, part_total_quasipoly, partition_quasipoly

__all__ = [
    "AsymptoticProfile",
    "DegreeAudit",
    "ThresholdReport",
    "ThresholdRow",
    "degree_bound_audit",
    "invariance_verdict",
    "leading_term",
    "slope",
    "slope_polynomial",
    "threshold_report",
]

ASSUMPTION = "h^0 = chi assumed: higher cohomology is not computed"


def _branches(chi) -> tuple[TwistPoly, ...]:
    if isinstance(chi, QuasiPoly):
        return chi.branches
    if isinstance(chi, TwistPoly):
        return (chi,)
    return (TwistPoly.constant(chi),)


def _m_part(poly: TwistPoly) -> dict[int, Fraction]:
    # coefficients of m^a at q = 0
    return {a: c.to_fraction() for (a, b), c in poly.terms.items() if b == 0}


def leading_term(chi) -> tuple[int, Fraction]:
    """(degree in m, leading coefficient) at q = 0; the zero polynomial gives (0, 0)."""
    heads = set()
    for branch in _branches(chi):
        coeffs = {a: c for a, c in _m_part(branch).items() if c}
        if not coeffs:
            heads.add((0, Fraction(0)))
        else:
            d = max(coeffs)
            heads.add((d, coeffs[d]))
    if len(heads) != 1:
        raise ValueError("leading term is not residue-independent")
    return heads.pop()


def _m_coefficient(chi, n: int) -> Fraction:
    values = {_m_part(b).get(n, Fraction(0)) for b in _branches(chi)}
    if len(values) != 1:
        raise ValueError("leading term is not residue-independent")
    return values.pop()


def slope(p: OrbifoldPresentation, bundle=None) -> Fraction:
    """n! times the coefficient of m^n in the total Euler characteristic."""
    return math.factorial(p.ambient_dim) * _m_coefficient(total_chi(p), p.ambient_dim)


def _poly_degree(chi) -> int:
    return max(b.degree_m() for b in _branches(chi))


@dataclass
class DegreeAudit:
    passed: bool
    rows: list[dict] = field(default_factory=list)
    twisted_degree: int | None = None

    def to_json(self) -> dict:
        return asdict(self)


def degree_bound_audit(p: OrbifoldPresentation) -> DegreeAudit:
    """deg_m of each sector against dim (and n - 1 for twisted sectors); never raises on failure."""
    rows = []
    twisted = None
    passed = True
    for sector in p.sectors:
        deg = _poly_degree(sector_chi(sector))
        bound = sector.dim if sector.is_identity else min(sector.dim, p.ambient_dim - 1)
        ok = deg <= bound
        passed &= ok
        if not sector.is_identity and deg >= 0:
            twisted = deg if twisted is None else max(twisted, deg)
        rows.append(
            {
                "label": sector.label,
                "dim": sector.dim,
                "group_order": sector.group_order,
                "degree": deg,
                "bound": bound,
                "ok": ok,
            }
        )
    return DegreeAudit(passed, rows, twisted)


@dataclass(frozen=True)
class AsymptoticProfile:
    ambient_dim: int
    degree: int
    leading: Fraction
    identity_leading: Fraction
    twisted_max_degree: int | None
    generic_stab: int
    coarse_normalized: Fraction

    def to_json(self) -> dict:
        out = asdict(self)
        for key in ("leading", "identity_leading", "coarse_normalized"):
            out[key] = str(out[key])
        return out


def invariance_verdict(p: OrbifoldPresentation) -> AsymptoticProfile:
    """Total and identity leading data; raises if the m^n coefficients differ."""
    n = p.ambient_dim
    total = total_chi(p)
    ident = identity_chi(p)
    lead = _m_coefficient(total, n)
    id_lead = _m_coefficient(ident, n)
    if lead != id_lead:
        raise InvariantViolation(f"m^{n} coefficient {lead} differs from identity sector {id_lead}")
    twisted = [_poly_degree(sector_chi(s)) for s in p.twisted_sectors]
    twisted = [d for d in twisted if d >= 0]
    return AsymptoticProfile(
        ambient_dim=n,
        degree=_poly_degree(total),
        leading=lead,
        identity_leading=id_lead,
        twisted_max_degree=max(twisted) if twisted else None,
        generic_stab=p.generic_stab,
        coarse_normalized=lead * p.generic_stab,
    )


# -- jet thresholds on curves -----------------------------------------------------


def slope_polynomial(chi) -> tuple[int, tuple[Fraction, ...]]:
    """Top homogeneous part of chi(m, q) along q = lam*m, as coefficients of lam^0, lam^1, ...

    Every residue branch must give the same part.
    """
    parts = set()
    for branch in _branches(chi):
        top = branch.total_degree()
        coeffs = [Fraction(0)] * (top + 1 if top >= 0 else 1)
        for (a, b), c in branch.terms.items():
            if a + b == top:
                coeffs[b] = c.to_fraction()
        while len(coeffs) > 1 and not coeffs[-1]:
            coeffs.pop()
        parts.add((top, tuple(coeffs)))
    if len(parts) != 1:
        raise ValueError("leading term is not residue-independent")
    return parts.pop()


def _critical(coeffs: tuple[Fraction, ...]) -> Fraction | None:
    """sup of lam with h(lam) > 0 for linear h; None when the sup is infinite."""
    coeffs = list(coeffs) + [Fraction(0)] * (2 - len(coeffs))
    if any(coeffs[2:]):
        raise ValueError("slope polynomial is not linear in lam")
    h0, h1 = coeffs[0], coeffs[1]
    if h1 < 0:
        return -h0 / h1
    if h1 == 0 and h0 <= 0:
        raise ValueError("leading coefficient is never positive")
    return None


@dataclass(frozen=True)
class ThresholdRow:
    k: int
    leading_full: tuple[Fraction, ...]
    leading_identity: tuple[Fraction, ...]
    lambda_full: Fraction | None
    lambda_identity: Fraction | None
    lambda_demailly_identity: Fraction | None

    @property
    def verdict(self) -> str:
        return "equal" if self.lambda_full == self.lambda_identity else "differs"


def _fmt(x):
    if x is None:
        return None
    if isinstance(x, tuple):
        return [str(v) for v in x]
    return str(x)


@dataclass
class ThresholdReport:
    curve: str
    ample_degree: Fraction
    orbifold_value: Fraction
    coarse_value: Fraction
    rows: list[ThresholdRow]
    assumption: str = ASSUMPTION

    @property
    def verdict(self) -> str:
        return "equal" if all(r.verdict == "equal" for r in self.rows) else "differs"

    def to_json(self) -> dict:
        return {
            "curve": self.curve,
            "ample_degree": str(self.ample_degree),
            "orbifold_value": str(self.orbifold_value),
            "coarse_value": str(self.coarse_value),
            "verdict": self.verdict,
            "assumption": self.assumption,
            "rows": [
                {
                    "k": r.k,
                    "leading_full": _fmt(r.leading_full),
                    "leading_identity": _fmt(r.leading_identity),
                    "lambda_full": _fmt(r.lambda_full),
                    "lambda_identity": _fmt(r.lambda_identity),
                    "lambda_demailly_identity": _fmt(r.lambda_demailly_identity),
                    "verdict": r.verdict,
                }
                for r in self.rows
            ],
        }


def threshold_report(curve: OrbifoldCurve, k_max: int, ample_degree=1) -> ThresholdReport:
    """Critical slopes lam*(k), k = 1..k_max, for E^GG_{k,m} (x) L^{-lam m} on a curve.

    chi(E_{k,m} L^-q) = p_k(m) chi(K^m L^-q) in the weight grading, with
    p_k and chi(K^m L^-q) exact quasi-polynomials.  lam* is read from the
    top-degree part along q = lam m, once for the full fixed-point sum and
    once for the identity sector.  The Demailly grading column uses
    sum_a (sum a_j) in place of m p_k(m), identity sector only.
    """
    a = Fraction(ample_degree)
    if a <= 0:
        raise ValueError("ample degree must be positive")
    if k_max < 1:
        raise ValueError("k_max must be at least 1")
    twist = canonical_twist_curve(curve, a)
    line_full = total_chi(twist)
    line_id = identity_chi(twist)
    K = curve.deg_canonical
    rows = []
    for k in range(1, k_max + 1):
        p_k = partition_quasipoly(k)
        full = slope_polynomial(p_k * line_full)[1]
        ident = slope_polynomial(p_k * line_id)[1]
        lead_p = leading_term(p_k)[1]
        lead_n = leading_term(part_total_quasipoly(k))[1]
        rows.append(
            ThresholdRow(
                k=k,
                leading_full=full,
                leading_identity=ident,
                lambda_full=_critical(full),
                lambda_identity=_critical(ident),
                lambda_demailly_identity=K * lead_n / (a * lead_p),
            )
        )
    cones = ",".join(str(c.order) for c in curve.cones)
    return ThresholdReport(
        curve=f"g={curve.genus} cones=({cones})",
        ample_degree=a,
        orbifold_value=K / a,
        coarse_value=Fraction(2 * curve.genus - 2) / a,
        rows=rows,
    )
