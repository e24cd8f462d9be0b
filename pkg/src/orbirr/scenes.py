"""Builders turning concrete geometric objects into sector presentations.

Conventions shared by every builder:

* H is the hyperplane class upstairs (or the point class of a curve's coarse
  space); ``fundamental_degree`` is the orbifold integral of H^dim.
* A twisted sector of g^j carries the rotation angles theta of g^j on the
  normal directions and the trace of g^j on each fiber piece, in the
  pairing used by ``denominator_factor`` (1 - e^{-2 pi i theta} ...).
* The m symbol twists by an ample line bundle pulled back from the coarse
  space (stabilizers act trivially on it), unless stated otherwise.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .algebra import Cyclotomic, QuasiPoly, TwistPoly, root_of_unity
from .kawasaki import (
    FiberPiece,
    NormalSummand,
    OrbifoldPresentation,
    PresentationError,
    Sector,
)

__all__ = [
    "BundleSpec",
    "ConePoint",
    "OrbifoldCurve",
    "canonical_twist_curve",
    "cyclic_quotient_p1",
    "cyclic_quotient_pn",
    "gg_jet_curve",
    "hypersurface",
    "jet_piece_counts",
    "jet_rank",
    "orbifold_curve",
    "partition_quasipoly",
    "part_total_quasipoly",
    "projective_space",
]


@dataclass(frozen=True)
class BundleSpec:
    """Bundle vocabulary shared with scene files.

    kind is one of "line" (degree ``coeff`` plus isotropy weights at cone
    points), "virtual_sum" (``summands`` of (multiplicity, line spec)) or
    "gg_jet" (Green-Griffiths jets of order ``k``).
    """

    kind: str = "line"
    coeff: Fraction = Fraction(0)
    isotropy_weights: tuple[int, ...] = ()
    summands: tuple[tuple[int, BundleSpec], ...] = ()
    k: int = 0
    twist_q_coeff: Fraction | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("line", "virtual_sum", "gg_jet"):
            raise ValueError(f"unknown bundle kind {self.kind!r}")
        object.__setattr__(self, "coeff", Fraction(self.coeff))
        object.__setattr__(self, "isotropy_weights", tuple(int(w) for w in self.isotropy_weights))
        if self.twist_q_coeff is not None:
            object.__setattr__(self, "twist_q_coeff", Fraction(self.twist_q_coeff))
        if self.kind == "gg_jet" and self.k < 1:
            raise ValueError("jet order k must be at least 1")

    @classmethod
    def line(cls, coeff=0, isotropy_weights=(), twist_q_coeff=None) -> BundleSpec:
        return cls("line", coeff, tuple(isotropy_weights), twist_q_coeff=twist_q_coeff)

    @classmethod
    def virtual_sum(cls, summands, twist_q_coeff=None) -> BundleSpec:
        return cls("virtual_sum", summands=tuple(summands), twist_q_coeff=twist_q_coeff)

    @classmethod
    def gg_jet(cls, k: int, twist_q_coeff=None) -> BundleSpec:
        return cls("gg_jet", k=k, twist_q_coeff=twist_q_coeff)

    def lines(self) -> list[tuple[int, BundleSpec]]:
        if self.kind == "line":
            return [(1, self)]
        if self.kind == "virtual_sum":
            return list(self.summands)
        raise ValueError("jet bundles have no fixed line decomposition")


@dataclass(frozen=True)
class ConePoint:
    order: int
    label: str = ""

    def __post_init__(self) -> None:
        if self.order < 2:
            raise ValueError(f"cone point order must be >= 2, got {self.order}")


@dataclass(frozen=True)
class OrbifoldCurve:
    genus: int
    cones: tuple[ConePoint, ...] = ()

    def __post_init__(self) -> None:
        if self.genus < 0:
            raise ValueError("genus must be non-negative")
        cones = tuple(c if isinstance(c, ConePoint) else ConePoint(int(c)) for c in self.cones)
        object.__setattr__(self, "cones", cones)

    @property
    def deg_canonical(self) -> Fraction:
        """Orbifold canonical degree 2g - 2 + sum(1 - 1/nu)."""
        return 2 * self.genus - 2 + sum((1 - Fraction(1, c.order) for c in self.cones), Fraction(0))

    @property
    def deg_tangent(self) -> Fraction:
        return -self.deg_canonical

    def cone_label(self, i: int) -> str:
        return self.cones[i].label or f"p{i}"


# -- manifolds ----------------------------------------------------------------


def projective_space(n: int, k=0) -> tuple[OrbifoldPresentation, BundleSpec]:
    """P^n with O(k), twisted by O(m) and O(-q); Td(TP^n) from the Euler sequence."""
    if n < 1:
        raise ValueError("n must be positive")
    sector = Sector(
        "identity",
        dim=n,
        fundamental_degree=1,
        prefactor=1,
        tangent_roots_plus=(1,) * (n + 1),
        bundle=(FiberPiece(k),),
        ample_coeff=1,
    )
    p = OrbifoldPresentation(f"P^{n}, O({k})", n, (sector,), coarse_ample_degree=1)
    return p, BundleSpec.line(k)


def hypersurface(n: int, d: int, k=0) -> tuple[OrbifoldPresentation, BundleSpec]:
    """Smooth degree-d hypersurface Y_d in P^n with O(k); TY = TP^n|Y - O(d)."""
    if n < 2 or d < 1:
        raise ValueError("need n >= 2 and d >= 1")
    sector = Sector(
        "identity",
        dim=n - 1,
        fundamental_degree=d,
        prefactor=1,
        tangent_roots_plus=(1,) * (n + 1),
        tangent_roots_minus=(d,),
        bundle=(FiberPiece(k),),
        ample_coeff=1,
    )
    p = OrbifoldPresentation(f"Y_{d} in P^{n}, O({k})", n - 1, (sector,), coarse_ample_degree=d)
    return p, BundleSpec.line(k)


# -- global cyclic quotients -----------------------------------------------------


def cyclic_quotient_pn(weights, r: int, lin: int = 0, k: int = 0) -> tuple[OrbifoldPresentation, BundleSpec]:
    """[P^n / Z_r] with zeta acting by z_i -> zeta^{w_i} z_i, bundle O(k).

    The monomial z^a spans a line of weight sum(a_i w_i) + lin in
    H^0(O(k)).  The m twist is O(r) = pi^* O_Y(1), on which every
    stabilizer acts trivially.
    """
    weights = tuple(int(w) % r for w in weights)
    n = len(weights) - 1
    if n < 1 or r < 2:
        raise ValueError("need at least two homogeneous coordinates and r >= 2")
    if math.gcd(r, *(w - weights[0] for w in weights)) != 1:
        raise PresentationError("rigidify first: action has kernel")
    sectors = [
        Sector(
            "identity",
            dim=n,
            fundamental_degree=Fraction(1, r),
            prefactor=1,
            tangent_roots_plus=(1,) * (n + 1),
            bundle=(FiberPiece(k),),
            ample_coeff=r,
        )
    ]
    for j in range(1, r):
        order = r // math.gcd(j, r)
        classes: dict[int, list[int]] = {}
        for i, w in enumerate(weights):
            classes.setdefault(j * w % r, []).append(i)
        for block in sorted(classes.values()):
            s = block[0]
            normals = tuple(
                NormalSummand(1, Fraction(j * (weights[i] - weights[s]) % r, r))
                for i in range(n + 1)
                if i not in block
            )
            char = root_of_unity(r, -j * (k * weights[s] + lin))
            coords = "".join(str(i) for i in block)
            sectors.append(
                Sector(
                    f"g^{j} on P(z{coords})",
                    dim=len(block) - 1,
                    fundamental_degree=1,
                    prefactor=Fraction(1, r),
                    group_order=order,
                    tangent_roots_plus=(1,) * len(block),
                    normals=normals,
                    bundle=(FiberPiece(k, char),),
                    ample_coeff=r,
                )
            )
    name = f"[P^{n}/Z{r}] w={weights} lin={lin % r}, O({k})"
    p = OrbifoldPresentation(name, n, tuple(sectors), coarse_ample_degree=Fraction(r) ** (n - 1))
    return p, BundleSpec.line(k)


def cyclic_quotient_p1(r: int, rot=(0, 1), lin: int = 0, k: int = 0) -> tuple[OrbifoldPresentation, BundleSpec]:
    """[P^1 / Z_r]; at the fixed point of w = z1/z0 the angle of g^j is (w1-w0)j/r."""
    w0, w1 = rot
    if (w0 - w1) % r == 0:
        raise PresentationError("rigidify first: action has kernel")
    return cyclic_quotient_pn((w0, w1), r, lin, k)


# -- orbifold curves ------------------------------------------------------------


def _curve(genus_or_curve, cones) -> OrbifoldCurve:
    if isinstance(genus_or_curve, OrbifoldCurve):
        return genus_or_curve
    return OrbifoldCurve(int(genus_or_curve), tuple(cones))


def orbifold_curve(genus, cones=(), bundle: BundleSpec | None = None, ample_degree=1):
    """Orbifold curve with cone points, as a presentation plus bundle data.

    A line bundle with coarse degree c and isotropy weights w_i has
    orbifold degree c + sum(w_i / nu_i); the stabilizer at cone i acts on
    its fiber by zeta_nu^w (same orientation as on the tangent line).
    For ``BundleSpec.gg_jet`` the result is the canonical twist
    presentation, see ``canonical_twist_curve``.
    """
    curve = _curve(genus, cones)
    bundle = bundle or BundleSpec.line(0)
    if bundle.kind == "gg_jet":
        return canonical_twist_curve(curve, ample_degree, bundle.twist_q_coeff), bundle
    lines = []
    for mult, spec in bundle.lines():
        ws = spec.isotropy_weights or (0,) * len(curve.cones)
        if len(ws) != len(curve.cones):
            raise ValueError("one isotropy weight per cone point is required")
        # w and (w mod nu) differ by a multiple of the coarse point class
        shift = sum(w // c.order for w, c in zip(ws, curve.cones))
        ws = tuple(w % c.order for w, c in zip(ws, curve.cones))
        lines.append((mult, BundleSpec.line(spec.coeff + shift, ws, spec.twist_q_coeff)))
    reduced = lines[0][1] if bundle.kind == "line" else BundleSpec.virtual_sum(lines, bundle.twist_q_coeff)
    identity = Sector(
        "identity",
        dim=1,
        fundamental_degree=1,
        prefactor=1,
        tangent_roots_plus=(curve.deg_tangent,),
        bundle=tuple(
            FiberPiece(
                spec.coeff
                + sum((Fraction(w, c.order) for w, c in zip(spec.isotropy_weights, curve.cones)), Fraction(0)),
                multiplicity=mult,
            )
            for mult, spec in lines
        ),
        ample_coeff=ample_degree,
        q_coeff=bundle.twist_q_coeff,
    )
    sectors = [identity]
    for i, cone in enumerate(curve.cones):
        nu = cone.order
        for j in range(1, nu):
            pieces = tuple(
                FiberPiece(0, root_of_unity(nu, j * spec.isotropy_weights[i]), multiplicity=mult)
                for mult, spec in lines
            )
            sectors.append(_cone_sector(curve, i, j, pieces, ample_degree, bundle.twist_q_coeff))
    cone_text = ",".join(str(c.order) for c in curve.cones)
    name = f"curve g={curve.genus} cones=({cone_text})"
    p = OrbifoldPresentation(name, 1, tuple(sectors), coarse_ample_degree=ample_degree)
    return p, reduced


def _cone_sector(curve: OrbifoldCurve, i: int, j: int, pieces, ample, q_coeff) -> Sector:
    nu = curve.cones[i].order
    return Sector(
        f"{curve.cone_label(i)} g^{j}",
        dim=0,
        fundamental_degree=1,
        prefactor=Fraction(1, nu),
        group_order=nu // math.gcd(j, nu),
        normals=(NormalSummand(0, Fraction(j, nu)),),
        bundle=pieces,
        ample_coeff=ample,
        q_coeff=q_coeff,
    )


def _canonical_m_weight(nu: int, j: int) -> int:
    # g^j acts on K^m by zeta_nu^{-jm}; rewrite as zeta_order^{w m}
    g = math.gcd(j, nu)
    return (-(j // g)) % (nu // g)


def canonical_twist_curve(curve: OrbifoldCurve, ample_degree=1, q_coeff=None) -> OrbifoldPresentation:
    """Presentation of K_orb^m (x) L^-q on an orbifold curve, L = pi^*A of degree a.

    The m twist is the orbifold canonical bundle, so cone sectors carry
    m-dependent characters and chi is a quasi-polynomial in m.
    """
    a = Fraction(ample_degree if q_coeff is None else q_coeff)
    identity = Sector(
        "identity",
        dim=1,
        fundamental_degree=1,
        prefactor=1,
        tangent_roots_plus=(curve.deg_tangent,),
        bundle=(FiberPiece(0),),
        ample_coeff=curve.deg_canonical,
        q_coeff=a,
    )
    sectors = [identity]
    for i, cone in enumerate(curve.cones):
        for j in range(1, cone.order):
            piece = FiberPiece(0, 1, _canonical_m_weight(cone.order, j))
            sectors.append(_cone_sector(curve, i, j, (piece,), curve.deg_canonical, a))
    cone_text = ",".join(str(c.order) for c in curve.cones)
    return OrbifoldPresentation(f"K^m L^-q on curve g={curve.genus} cones=({cone_text})", 1, tuple(sectors))


# -- Green-Griffiths jets on curves ----------------------------------------------


@lru_cache(maxsize=None)
def _jet_table(k: int, size: int) -> tuple[tuple[int, ...], ...]:
    # table[w][t] over parts 1..k, grown one part size at a time
    table = [[0] * (w + 1) for w in range(size + 1)]
    table[0][0] = 1
    for part in range(1, k + 1):
        for w in range(part, size + 1):
            row, prev = table[w], table[w - part]
            for t in range(1, w - part + 2):
                row[t] += prev[t - 1]
    return tuple(tuple(row) for row in table)


def jet_piece_counts(k: int, m: int) -> tuple[int, ...]:
    """counts[t] = #{(a_1..a_k) >= 0 : sum j a_j = m, sum a_j = t}."""
    if k < 1:
        raise ValueError("jet order k must be at least 1")
    if m < 0:
        return ()
    size = 64
    while size < m:
        size *= 2
    return _jet_table(k, size)[m]


def jet_rank(k: int, m: int) -> int:
    """Rank of E^GG_{k,m} on a curve: partitions of m into parts <= k."""
    return sum(jet_piece_counts(k, m))


def gg_jet_curve(k: int, curve, m: int, ample_degree=1, grading: str = "weight"):
    """E^GG_{k,m} (x) L^-q on an orbifold curve at a fixed weight m.

    grading="weight": every graded piece is K^m, multiplicity p_k(m).
    grading="demailly": the piece of jet monomial a is K^{sum a_j}.
    The q symbol twists by L = pi^*A of degree ``ample_degree``.
    """
    curve = _curve(curve, ()) if not isinstance(curve, OrbifoldCurve) else curve
    if k < 1:
        raise ValueError("jet order k must be at least 1")
    if m < 0:
        raise ValueError("jet weight m must be non-negative")
    counts = jet_piece_counts(k, m)
    if grading == "weight":
        pieces = [(m, sum(counts))]
    elif grading == "demailly":
        pieces = [(t, c) for t, c in enumerate(counts) if c]
    else:
        raise ValueError(f"unknown grading {grading!r}")
    a = Fraction(ample_degree)
    K = curve.deg_canonical
    identity = Sector(
        "identity",
        dim=1,
        fundamental_degree=1,
        prefactor=1,
        tangent_roots_plus=(curve.deg_tangent,),
        bundle=tuple(FiberPiece(t * K, multiplicity=c) for t, c in pieces),
        q_coeff=a,
    )
    sectors = [identity]
    for i, cone in enumerate(curve.cones):
        nu = cone.order
        for j in range(1, nu):
            bundle = tuple(FiberPiece(0, root_of_unity(nu, -j * t), multiplicity=c) for t, c in pieces)
            sectors.append(_cone_sector(curve, i, j, bundle, 0, a))
    cone_text = ",".join(str(c.order) for c in curve.cones)
    name = f"E^GG_{k},{m} ({grading}) on curve g={curve.genus} cones=({cone_text})"
    p = OrbifoldPresentation(name, 1, tuple(sectors))
    return p, BundleSpec.gg_jet(k, a)


# -- quasi-polynomial fits for jet multiplicities --------------------------------


def _binomial_poly(i: int) -> TwistPoly:
    # t (t-1) ... (t-i+1) / i!  as a polynomial in the m slot
    out = TwistPoly.constant(1)
    for s in range(i):
        out = out * TwistPoly({(1, 0): 1, (0, 0): -s})
    return out * Fraction(1, math.factorial(i))


def _fit_quasi(values, period: int, degree: int) -> QuasiPoly:
    """Quasi-polynomial of the given period and degree through values(m), m >= 0."""
    branches = []
    for r in range(period):
        samples = [Fraction(values(r + period * t)) for t in range(degree + 1)]
        diffs = []
        row = samples
        while row:
            diffs.append(row[0])
            row = [b - a for a, b in zip(row, row[1:])]
        in_t = TwistPoly()
        for i, d in enumerate(diffs):
            if d:
                in_t = in_t + _binomial_poly(i) * d
        branch = in_t.substitute_m_affine(Fraction(1, period), Fraction(-r, period))
        check = r + period * (degree + 1)
        if branch.evaluate(check).to_fraction() != values(check):
            raise ArithmeticError("quasi-polynomial fit failed its extra check point")
        branches.append(branch)
    return QuasiPoly(branches)


@lru_cache(maxsize=None)
def partition_quasipoly(k: int) -> QuasiPoly:
    """p_k(m) as a quasi-polynomial of degree k-1 and period lcm(1..k)."""
    return _fit_quasi(lambda m: jet_rank(k, m), math.lcm(*range(1, k + 1)), k - 1)


@lru_cache(maxsize=None)
def part_total_quasipoly(k: int) -> QuasiPoly:
    """sum over partitions of m into parts <= k of the number of parts (degree k)."""
    def total(m: int) -> int:
        return sum(t * c for t, c in enumerate(jet_piece_counts(k, m)))

    return _fit_quasi(total, math.lcm(*range(1, k + 1)), k)
