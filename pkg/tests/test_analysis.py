from __future__ import annotations

import json
from fractions import Fraction

import pytest

from orbirr.algebra import QuasiPoly, TwistPoly
from orbirr.analysis import (
    degree_bound_audit,
    invariance_verdict,
    leading_term,
    slope,
    slope_polynomial,
    threshold_report,
)
from orbirr.kawasaki import (
    FiberPiece,
    InvariantViolation,
    OrbifoldPresentation,
    Sector,
    disjoint_union,
    rigidify,
    with_trivial_gerbe,
)
from orbirr.scenes import OrbifoldCurve, cyclic_quotient_p1, cyclic_quotient_pn, projective_space

m, q = TwistPoly.m(), TwistPoly.q()


def test_leading_term_examples():
    assert leading_term(m + 1) == (1, 1)
    assert leading_term((m * 2 + 1) * Fraction(1, 2) + Fraction(1, 2)) == (1, 1)
    assert leading_term(TwistPoly()) == (0, 0)


def test_leading_term_quasi():
    assert leading_term(QuasiPoly([m * 3 + 1, m * 3])) == (1, 3)
    with pytest.raises(ValueError, match="not residue-independent"):
        leading_term(QuasiPoly([m * 3, m * 2]))


def p1_gerbe(s):
    ident = Sector("identity", 1, 1, Fraction(1, s), tangent_roots_plus=(1, 1), bundle=(FiberPiece(0),), ample_coeff=1)
    return OrbifoldPresentation("p1 gerbe", 1, (ident,), generic_stab=s, coarse_ample_degree=1)


def test_slope_examples():
    assert slope(projective_space(1)[0]) == 1
    assert slope(p1_gerbe(2)) == Fraction(1, 2)
    football, _ = cyclic_quotient_p1(2, (0, 1), 0, 0)
    # the m twist is pi^*O(1) = O(2) upstairs, of orbifold degree 1
    assert slope(football) == 1
    assert slope(projective_space(3)[0]) == 1


def test_degree_audit():
    manifold = degree_bound_audit(projective_space(2)[0])
    assert manifold.passed and manifold.twisted_degree is None
    football = degree_bound_audit(cyclic_quotient_p1(2, (0, 1), 0, 2)[0])
    assert football.passed and football.twisted_degree == 0
    plane = degree_bound_audit(cyclic_quotient_pn((0, 0, 1), 3, 0, 0)[0])
    assert plane.passed and plane.twisted_degree == 1


def test_degree_audit_flags_fat_twisted_sector():
    ident = Sector("identity", 1, 1, Fraction(1, 2), tangent_roots_plus=(1, 1), bundle=(FiberPiece(0),), ample_coeff=1)
    fat = Sector("fat", 1, 1, Fraction(1, 2), group_order=2, tangent_roots_plus=(1, 1), bundle=(FiberPiece(0, -1),), ample_coeff=1)
    audit = degree_bound_audit(OrbifoldPresentation("fat", 1, (ident, fat), generic_stab=2))
    assert not audit.passed
    assert [r["ok"] for r in audit.rows] == [True, False]
    json.dumps(audit.to_json())


def test_invariance_verdict_pullback():
    profile = invariance_verdict(cyclic_quotient_p1(3, (0, 1), 0, 3)[0])
    assert profile.leading == profile.identity_leading == 1
    assert profile.twisted_max_degree == 0
    json.dumps(profile.to_json())


def test_rigidify_keeps_normalized_coefficient():
    base, _ = cyclic_quotient_p1(2, (0, 1), 0, 2)
    gerbe = with_trivial_gerbe(base, 3)
    before = invariance_verdict(gerbe)
    after = invariance_verdict(rigidify(gerbe))
    assert before.generic_stab == 6 // 2
    assert before.coarse_normalized == after.coarse_normalized == after.leading
    assert before.leading == Fraction(1, 3)


def test_disjoint_union_adds_coefficients():
    a = projective_space(1)[0]
    b = p1_gerbe(2)
    profile = invariance_verdict(disjoint_union([a, b]))
    assert profile.leading == 1 + Fraction(1, 2)


def test_invariance_verdict_raises_on_disagreement():
    ident = Sector("identity", 1, 1, Fraction(1, 2), tangent_roots_plus=(1, 1), bundle=(FiberPiece(0),), ample_coeff=1)
    fat = Sector("fat", 1, 1, Fraction(1, 2), group_order=2, tangent_roots_plus=(1, 1), bundle=(FiberPiece(0, -1),), ample_coeff=1)
    with pytest.raises(InvariantViolation):
        invariance_verdict(OrbifoldPresentation("fat", 1, (ident, fat), generic_stab=2))


def test_slope_polynomial():
    chi = m * 3 - q * 2 + 5
    assert slope_polynomial(chi) == (1, (3, -2))
    with pytest.raises(ValueError):
        slope_polynomial(QuasiPoly([m, m * 2]))


@pytest.mark.parametrize(
    "curve,a,expected",
    [
        (OrbifoldCurve(2), 2, Fraction(1)),
        (OrbifoldCurve(0, (2, 3, 7)), 1, Fraction(1, 42)),
        (OrbifoldCurve(1), 1, Fraction(0)),
    ],
)
def test_threshold_examples(curve, a, expected):
    report = threshold_report(curve, 4, a)
    assert report.orbifold_value == expected
    assert report.verdict == "equal"
    for row in report.rows:
        assert row.lambda_full == row.lambda_identity == expected
    json.dumps(report.to_json())


def test_threshold_coarse_column_and_leading_data():
    report = threshold_report(OrbifoldCurve(0, (2, 3, 7)), 2, 1)
    assert report.coarse_value == -2
    row = report.rows[1]
    # p_2(m) ~ m/2, chi(K^m L^-q) ~ m/42 - q
    assert row.leading_full == (Fraction(1, 84), Fraction(-1, 2))
    assert row.lambda_demailly_identity == Fraction(1, 56)


def test_threshold_input_checks():
    with pytest.raises(ValueError):
        threshold_report(OrbifoldCurve(2), 3, 0)
    with pytest.raises(ValueError):
        threshold_report(OrbifoldCurve(2), 0, 1)
