from __future__ import annotations

import json

import pytest

from orbirr.oracle import (
    OracleReport,
    cross_check,
    floor_divisor_chi,
    hypersurface_chi,
    molien_count,
    monomial_count,
    parse_grid,
    partition_count,
    worker_count,
)


@pytest.mark.parametrize("n,k,expected", [(1, 3, 4), (2, 2, 6), (3, 2, 10), (2, -1, 0), (4, 0, 1)])
def test_monomial_count(n, k, expected):
    assert monomial_count(n, k) == expected


@pytest.mark.parametrize(
    "r,rot,fiber,k,expected",
    [(2, (0, 1), 0, 2, 2), (3, (0, 1), 0, 3, 2), (5, (1, 3), 0, 0, 1), (5, (2, 4), 0, 0, 1)],
)
def test_molien_count(r, rot, fiber, k, expected):
    assert molien_count(r, rot, fiber, k) == expected


def test_molien_callable_weight_matches_constant():
    for k in range(8):
        assert molien_count(4, (0, 1, 3), lambda a: 2, k) == molien_count(4, (0, 1, 3), 2, k)


def test_molien_isotypic_pieces_sum_to_monomials():
    for r in (2, 3, 5):
        for k in range(12):
            total = sum(molien_count(r, (0, 1), f, k) for f in range(r))
            assert total == monomial_count(1, k)
            total = sum(molien_count(r, (0, 1, 2), f, k) for f in range(r))
            assert total == monomial_count(2, k)


@pytest.mark.parametrize("n,d,m,expected", [(2, 2, 1, 3), (2, 3, 0, 0), (3, 4, 0, 2)])
def test_hypersurface_chi(n, d, m, expected):
    assert hypersurface_chi(n, d, m) == expected


def test_hypersurface_chi_monotone_in_stable_range():
    for n in (2, 3, 4):
        for d in range(1, 6):
            for m in range(d, 20):
                assert hypersurface_chi(n, d, m) - hypersurface_chi(n, d, m - 1) >= 0


@pytest.mark.parametrize("m,k,expected", [(4, 2, 3), (6, 3, 7), (0, 5, 1), (10, 1, 1), (5, 5, 7)])
def test_partition_count(m, k, expected):
    assert partition_count(m, k) == expected


@pytest.mark.parametrize(
    "g,cones,c,expected",
    [
        (0, [], 1, 2),
        (0, [(2, 1), (3, 2)], 0, 1),
        (2, [], 2, 1),
        (0, [(2, 3)], 0, 2),
        (1, [(3, -1)], 0, -1),
    ],
)
def test_floor_divisor_chi(g, cones, c, expected):
    assert floor_divisor_chi(g, cones, c) == expected


def test_parse_grid():
    assert parse_grid("r<=6,k<=30") == {"r": 6, "k": 30}
    assert parse_grid("k>=-5, g=2") == {"k_min": -5, "g": 2}
    with pytest.raises(ValueError):
        parse_grid("r<6")


def test_worker_count_env(monkeypatch):
    monkeypatch.setenv("ORBIRR_THREADS", "3")
    assert worker_count() == 3
    monkeypatch.setenv("ORBIRR_THREADS", "0")
    assert worker_count() >= 1
    monkeypatch.setenv("ORBIRR_THREADS", "many")
    with pytest.raises(ValueError):
        worker_count()


@pytest.mark.parametrize(
    "family,grid",
    [
        ("projective", "n<=3,k<=20"),
        ("hypersurface", "n<=3,d<=3"),
        ("cyclic", "r<=4,k<=12"),
        ("cyclic_plane", "r<=3,k<=6"),
        ("curve", "g<=1,order<=3,c<=3"),
        ("curve", "weights=2,order<=3,c<=2"),
        ("jet_rank", "k<=4,m<=30"),
    ],
)
def test_cross_check_small_grids(family, grid):
    report = cross_check(family, grid)
    assert report.cases > 0
    assert report.passed, report.mismatches[:5]


def test_cross_check_rejections_are_non_faithful_actions():
    report = cross_check("cyclic", "r<=4,k<=2")
    assert report.expected_errors
    assert all("rigidify first" in e["error"] for e in report.expected_errors)


def test_report_serializes():
    report = cross_check("jet_rank", "k<=2,m<=5")
    data = json.loads(json.dumps(report.to_json()))
    assert data["passed"] and data["cases"] == 12
    bad = OracleReport("x", {}, mismatches=[{"case": "c"}])
    assert not bad.passed


def test_unknown_family():
    with pytest.raises(ValueError):
        cross_check("nope")
