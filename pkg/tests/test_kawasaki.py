from __future__ import annotations

import random
from dataclasses import replace
from fractions import Fraction

import pytest

from orbirr.algebra import QuasiPoly, TwistPoly, root_of_unity
from orbirr.kawasaki import (
    FiberPiece,
    InvariantViolation,
    NormalSummand,
    OrbifoldPresentation,
    PresentationError,
    Sector,
    disjoint_union,
    evaluate_at,
    identity_chi,
    is_conjugate_closed,
    rigidify,
    sector_contribution,
    total_chi,
    twisted_chi,
    with_trivial_gerbe,
)
from orbirr.scenes import cyclic_quotient_p1, projective_space

m, q = TwistPoly.m(), TwistPoly.q()


def p1_identity(k=0, prefactor=1):
    return Sector("identity", 1, 1, prefactor, tangent_roots_plus=(1, 1), bundle=(FiberPiece(k),), ample_coeff=1)


def point(theta, prefactor, character=1, order=2):
    return Sector(
        "pt", 0, 1, prefactor, group_order=order, normals=(NormalSummand(0, theta),), bundle=(FiberPiece(0, character),)
    )


def test_p1_identity_sector():
    assert sector_contribution(p1_identity(3), symbols="") == TwistPoly.constant(4)
    assert sector_contribution(p1_identity(0)) == m - q + 1


def test_point_sector_quarter():
    assert sector_contribution(point(Fraction(1, 2), Fraction(1, 2))) == TwistPoly.constant(Fraction(1, 4))


def test_empty_bundle_contributes_zero():
    s = replace(p1_identity(), bundle=())
    assert sector_contribution(s).is_zero()


def test_normal_theta_must_be_inside_unit_interval():
    with pytest.raises(ValueError, match="θ=0"):
        NormalSummand(1, 0)
    with pytest.raises(ValueError):
        NormalSummand(1, 1)


def test_total_chi_p1():
    p, _ = projective_space(1, 0)
    assert total_chi(p) == m - q + 1
    assert evaluate_at(total_chi(p), 4, 0) == 5


def test_football_split():
    p, _ = cyclic_quotient_p1(2, (0, 1), 0, 2)
    assert evaluate_at(identity_chi(p)) == Fraction(3, 2)
    assert evaluate_at(twisted_chi(p)) == Fraction(1, 2)
    assert evaluate_at(total_chi(p)) == 2
    assert evaluate_at(total_chi(p), 3) == 5


def test_empty_presentation():
    p = OrbifoldPresentation("empty", 1, ())
    assert total_chi(p).is_zero()
    assert evaluate_at(total_chi(p), 7, 2) == 0


def test_one_sided_sector_set_is_detected():
    ident = p1_identity()
    lonely = point(Fraction(1, 3), Fraction(1, 3), root_of_unity(3, 1), order=3)
    p = OrbifoldPresentation("bad", 1, (ident, lonely))
    assert not is_conjugate_closed(p)
    with pytest.raises(InvariantViolation, match="conjugate sectors do not cancel"):
        total_chi(p)
    with pytest.raises(PresentationError):
        p.validate()


def test_twisted_sector_of_full_dimension_is_rejected():
    fat = Sector(
        "fat", 1, 1, Fraction(1, 2), group_order=2, tangent_roots_plus=(1, 1), bundle=(FiberPiece(0, -1),), ample_coeff=1
    )
    p = OrbifoldPresentation("fat", 1, (p1_identity(0, Fraction(1, 2)), fat), generic_stab=2)
    with pytest.raises(PresentationError):
        p.validate()
    with pytest.raises(InvariantViolation, match="twisted sector exceeds degree bound"):
        total_chi(p)


def test_validate_checks_identity_normalization():
    p = OrbifoldPresentation("half", 1, (p1_identity(0, Fraction(1, 2)),))
    with pytest.raises(PresentationError, match="expected 1/1"):
        p.validate()


def test_order_independence():
    p, _ = cyclic_quotient_p1(5, (1, 3), 2, 7)
    sectors = list(p.sectors)
    rng = random.Random(5)
    for _ in range(5):
        rng.shuffle(sectors)
        assert total_chi(replace(p, sectors=tuple(sectors))) == total_chi(p)


def test_identity_only_gerbe_scales():
    p = OrbifoldPresentation("p1-gerbe", 1, (p1_identity(0, Fraction(1, 3)),), generic_stab=3)
    p.validate()
    assert total_chi(p) == (m - q + 1) * Fraction(1, 3)
    r = rigidify(p)
    assert r.generic_stab == 1 and total_chi(r) == m - q + 1


def test_gerbe_over_football_rigidifies_back():
    base, _ = cyclic_quotient_p1(2, (0, 1), 0, 2)
    gerbe = with_trivial_gerbe(base, 3)
    gerbe.validate()
    assert gerbe.generic_stab == 3
    assert total_chi(gerbe) == total_chi(base) * Fraction(1, 3)
    assert total_chi(rigidify(gerbe)) == total_chi(base)


def test_rigidify_unchanged_for_s1():
    p, _ = projective_space(2, 1)
    assert rigidify(p) is p


def test_rigidify_rejects_inconsistent_prefactors():
    p = OrbifoldPresentation("odd", 1, (p1_identity(0, Fraction(1, 3)),), generic_stab=2)
    with pytest.raises(PresentationError, match="not a trivial gerbe"):
        rigidify(p)


def test_disjoint_union():
    a, _ = projective_space(1, 0)
    u = disjoint_union([a, a])
    assert total_chi(u) == (m - q + 1) * 2
    g = OrbifoldPresentation("g", 1, (p1_identity(0, Fraction(1, 2)),), generic_stab=2)
    mixed = disjoint_union([a, g]).validate()
    assert total_chi(mixed) == (m - q + 1) * Fraction(3, 2)
    assert mixed.component_stabs == (1, 2)
    assert total_chi(disjoint_union([a, OrbifoldPresentation("e", 1, ())])) == total_chi(a)
    with pytest.raises(ValueError):
        disjoint_union([a, projective_space(2)[0]])


def test_m_dependent_characters_give_quasipolynomial():
    # K^m on a football with two Z2 points: characters (-1)^m
    ident = Sector("identity", 1, 1, 1, tangent_roots_plus=(1,), bundle=(FiberPiece(0),), ample_coeff=-1)
    cone = Sector(
        "c", 0, 1, Fraction(1, 2), group_order=2, normals=(NormalSummand(0, Fraction(1, 2)),),
        bundle=(FiberPiece(0, 1, 1),), ample_coeff=-1,
    )
    p = OrbifoldPresentation("spindle K", 1, (ident, cone, cone)).validate()
    chi = total_chi(p)
    assert isinstance(chi, QuasiPoly) and chi.period == 2
    # K^m has coarse degree -2m and weight m at each cone point
    for mm in range(-6, 7):
        expected = -2 * mm + 2 * (mm // 2) + 1
        assert evaluate_at(chi, mm) == expected
