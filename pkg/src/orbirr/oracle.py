"""Brute-force section counts used to check the fixed-point engine.

Nothing here touches the algebra package: every oracle is an integer loop
over monomials, partitions or divisors.  ``cross_check`` pairs an oracle
with the engine over a parameter grid.
"""
from __future__ import annotations

import itertools
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

__all__ = [
    "FAMILIES",
    "OracleReport",
    "cross_check",
    "floor_divisor_chi",
    "hypersurface_chi",
    "molien_count",
    "monomial_count",
    "parse_grid",
    "partition_count",
    "projective_chi",
    "worker_count",
]


# -- oracles ---------------------------------------------------------------


def monomial_count(n: int, k: int) -> int:
    """Number of degree-k monomials in n+1 variables (0 for k < 0)."""
    if k < 0:
        return 0
    # ways[d] = monomials of degree d in the variables seen so far
    ways = [1] * (k + 1)
    for _ in range(n):
        for d in range(1, k + 1):
            ways[d] += ways[d - 1]
    return ways[k]


def _monomials(nvars: int, k: int):
    if nvars == 1:
        yield (k,)
        return
    for a in range(k + 1):
        for rest in _monomials(nvars - 1, k - a):
            yield (a,) + rest


def molien_count(r: int, rot, fiber_weight_fn: int | Callable = 0, k: int = 0) -> int:
    """Degree-k monomials z^a with sum(a_i w_i) + fiber = 0 (mod r).

    ``fiber_weight_fn`` is either a constant linearization weight or a
    function of the exponent tuple.
    """
    if k < 0:
        return 0
    rot = tuple(rot)
    if callable(fiber_weight_fn):
        return sum(
            1
            for a in _monomials(len(rot), k)
            if (sum(x * w for x, w in zip(a, rot)) + fiber_weight_fn(a)) % r == 0
        )
    # table[d][c] = monomials of degree d and weight c mod r
    table = [[0] * r for _ in range(k + 1)]
    table[0][0] = 1
    for w in rot:
        for d in range(1, k + 1):
            prev, row = table[d - 1], table[d]
            for c in range(r):
                row[(c + w) % r] += prev[c]
    return table[k][(-fiber_weight_fn) % r]


def projective_chi(n: int, k: int) -> int:
    """(k+1)(k+2)...(k+n)/n!, the Hilbert polynomial of P^n, at any integer k."""
    num = 1
    for i in range(1, n + 1):
        num *= k + i
    return num // math.factorial(n)


def hypersurface_chi(n: int, d: int, m: int) -> int:
    """chi(O_Y(m)) for a degree-d hypersurface, from the ideal sheaf sequence."""
    return projective_chi(n, m) - projective_chi(n, m - d)


def partition_count(m: int, k: int) -> int:
    """Partitions of m into parts of size at most k."""
    if m < 0:
        return 0
    ways = [1] + [0] * m
    for part in range(1, k + 1):
        for total in range(part, m + 1):
            ways[total] += ways[total - part]
    return ways[m]


def floor_divisor_chi(genus: int, cones, coarse_deg: int) -> int:
    """deg of the rounded-down divisor plus 1 - g.

    ``cones`` holds (order, weight) pairs; a weight w at a point of order nu
    contributes floor(w / nu) to the coarse divisor.
    """
    floor_deg = coarse_deg + sum(w // nu for nu, w in cones)
    return floor_deg + 1 - genus


# -- cross checking ----------------------------------------------------------


@dataclass
class OracleReport:
    scene: str
    grid: dict
    engine: dict[str, str] = field(default_factory=dict)
    oracle: dict[str, str] = field(default_factory=dict)
    mismatches: list[dict] = field(default_factory=list)
    expected_errors: list[dict] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.mismatches

    @property
    def cases(self) -> int:
        return len(self.engine)

    def to_json(self) -> dict:
        return {
            "scene": self.scene,
            "grid": self.grid,
            "cases": self.cases,
            "passed": self.passed,
            "engine": self.engine,
            "oracle": self.oracle,
            "mismatches": self.mismatches,
            "expected_errors": self.expected_errors,
        }


def worker_count() -> int:
    """Thread cap from ORBIRR_THREADS (0 or unset means one per CPU)."""
    raw = os.environ.get("ORBIRR_THREADS", "0").strip() or "0"
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"ORBIRR_THREADS must be an integer, got {raw!r}") from None
    if n < 0:
        raise ValueError("ORBIRR_THREADS must be non-negative")
    return n or (os.cpu_count() or 1)


def parse_grid(text: str) -> dict[str, int]:
    """Parse "r<=6,k<=30" (also "k>=-5", "g=2") into {"r": 6, "k": 30, "k_min": -5, ...}."""
    grid: dict[str, int] = {}
    for item in filter(None, (s.strip() for s in text.split(","))):
        for op, suffix in (("<=", ""), (">=", "_min"), ("=", "")):
            if op in item:
                key, _, value = item.partition(op)
                key = key.strip()
                if not key.isidentifier():
                    raise ValueError(f"bad grid key in {item!r}")
                try:
                    grid[key + suffix] = int(value)
                except ValueError:
                    raise ValueError(f"bad grid bound in {item!r}") from None
                break
        else:
            raise ValueError(f"grid items look like 'k<=30', got {item!r}")
    return grid


def _engine_value(presentation) -> Fraction:
    from .kawasaki import evaluate_at, total_chi

    return evaluate_at(total_chi(presentation), 0, 0)


def _projective_cases(grid):
    from .scenes import projective_space

    for n in range(grid.get("n_min", 1), grid.get("n", 3) + 1):
        for k in range(grid.get("k_min", 0), grid.get("k", 20) + 1):
            yield (f"n={n},k={k}", lambda n=n, k=k: _engine_value(projective_space(n, k)[0]),
                   lambda n=n, k=k: monomial_count(n, k))


def _hypersurface_cases(grid):
    from .scenes import hypersurface

    for n in range(grid.get("n_min", 2), grid.get("n", 4) + 1):
        for d in range(grid.get("d_min", 1), grid.get("d", 5) + 1):
            for m in range(grid.get("m_min", -5), grid.get("m", 10) + 1):
                yield (f"n={n},d={d},m={m}", lambda n=n, d=d, m=m: _engine_value(hypersurface(n, d, m)[0]),
                       lambda n=n, d=d, m=m: hypersurface_chi(n, d, m))


def _cyclic_cases(grid):
    from .scenes import cyclic_quotient_p1

    for r in range(grid.get("r_min", 2), grid.get("r", 6) + 1):
        for w0, w1 in itertools.product(range(r), repeat=2):
            for lin in range(r):
                for k in range(grid.get("k_min", 0), grid.get("k", 30) + 1):
                    yield (
                        f"r={r},rot=({w0},{w1}),lin={lin},k={k}",
                        lambda r=r, w=(w0, w1), lin=lin, k=k: _engine_value(cyclic_quotient_p1(r, w, lin, k)[0]),
                        lambda r=r, w=(w0, w1), lin=lin, k=k: molien_count(r, w, lin, k),
                    )


def _cyclic_plane_cases(grid):
    from .scenes import cyclic_quotient_pn

    n = grid.get("n", 2)
    for r in range(grid.get("r_min", 2), grid.get("r", 4) + 1):
        for rest in itertools.product(range(r), repeat=n):
            ws = (0,) + rest
            for lin in range(r):
                for k in range(grid.get("k_min", 0), grid.get("k", 8) + 1):
                    yield (
                        f"r={r},w={ws},lin={lin},k={k}",
                        lambda r=r, ws=ws, lin=lin, k=k: _engine_value(cyclic_quotient_pn(ws, r, lin, k)[0]),
                        lambda r=r, ws=ws, lin=lin, k=k: molien_count(r, ws, lin, k),
                    )


def _curve_cases(grid):
    from .scenes import BundleSpec, orbifold_curve

    orders = [o for o in (2, 3, 5, 7) if o <= grid.get("order", 7)]
    # weights=0: pulled back only; 1: every reduced weight; 2: weights in [-nu, 2nu)
    mode = grid.get("weights", 1)
    spans = {0: lambda nu: range(1), 1: range, 2: lambda nu: range(-nu, 2 * nu)}
    if mode not in spans:
        raise ValueError("curve grid 'weights' must be 0, 1 or 2")
    for g in range(grid.get("g_min", 0), grid.get("g", 2) + 1):
        for size in range(len(orders) + 1):
            for cones in itertools.combinations(orders, size):
                ranges = [spans[mode](nu) for nu in cones]
                for c in range(grid.get("c_min", -5), grid.get("c", 10) + 1):
                    for ws in itertools.product(*ranges):
                        yield (
                            f"g={g},cones={cones},w={ws},c={c}",
                            lambda g=g, cones=cones, ws=ws, c=c: _engine_value(
                                orbifold_curve(g, cones, BundleSpec.line(c, ws))[0]
                            ),
                            lambda g=g, cones=cones, ws=ws, c=c: floor_divisor_chi(g, zip(cones, ws), c),
                        )


def _jet_rank_cases(grid):
    from .scenes import jet_rank

    for k in range(grid.get("k_min", 1), grid.get("k", 6) + 1):
        for m in range(grid.get("m_min", 0), grid.get("m", 60) + 1):
            yield (f"k={k},m={m}", lambda k=k, m=m: jet_rank(k, m), lambda k=k, m=m: partition_count(m, k))


FAMILIES: dict[str, Callable] = {
    "projective": _projective_cases,
    "hypersurface": _hypersurface_cases,
    "cyclic": _cyclic_cases,
    "cyclic_plane": _cyclic_plane_cases,
    "curve": _curve_cases,
    "jet_rank": _jet_rank_cases,
}


def _run_case(case):
    from .kawasaki import PresentationError

    key, engine, oracle = case
    expected = oracle()
    try:
        got = engine()
    except PresentationError as exc:
        return key, None, expected, str(exc)
    return key, got, expected, None


def cross_check(family: str, grid: dict | str | None = None) -> OracleReport:
    """Compare engine and oracle on every grid point of a scene family.

    Presentations the builders reject (non-faithful actions) are listed
    under ``expected_errors`` rather than compared.
    """
    if family not in FAMILIES:
        raise ValueError(f"unknown family {family!r}; choose from {sorted(FAMILIES)}")
    if isinstance(grid, str):
        grid = parse_grid(grid)
    grid = dict(grid or {})
    cases = list(FAMILIES[family](grid))
    report = OracleReport(family, grid)
    workers = min(worker_count(), max(1, len(cases) // 64))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_case, cases, chunksize=64))
    else:
        results = [_run_case(c) for c in cases]
    for key, got, expected, error in results:
        if error is not None:
            report.expected_errors.append({"case": key, "error": error})
            continue
        report.engine[key] = str(got)
        report.oracle[key] = str(expected)
        if got != expected:
            report.mismatches.append({"case": key, "engine": str(got), "oracle": str(expected)})
    return report
