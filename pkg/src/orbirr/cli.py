"""Command-line interface: ``orbirr <command> [--builtin NAME | --scene FILE] ...``.

Exit codes: 0 success, 1 verification mismatch, 2 bad input, 3 internal
invariant violation.
"""
from __future__ import annotations

import argparse
import json
import re
import sys
from fractions import Fraction

from .algebra import QuasiPoly, TwistPoly
from .analysis import degree_bound_audit, invariance_verdict, threshold_report
from .kawasaki import (
    InvariantViolation,
    PresentationError,
    identity_chi,
    sector_chi,
    total_chi,
    twisted_chi,
)
from .oracle import FAMILIES, cross_check, parse_grid
from .sceneio import BUILTINS, SceneError, builtin_document, builtin_scene, export_presentation, load_scene

EXIT_OK, EXIT_MISMATCH, EXIT_INPUT, EXIT_INVARIANT = 0, 1, 2, 3

_RATE = re.compile(r"^\s*(-?\d+(?:/\d+)?)?\s*\*?\s*m\s*$")


class InputError(ValueError):
    pass


def _parse_m(text: str | None):
    if text is None or text == "symbolic":
        return None
    try:
        return int(text)
    except ValueError:
        raise InputError(f"--m takes an integer or 'symbolic', got {text!r}") from None


def _parse_q(text: str | None):
    """Return ("value", Fraction) or ("rate", Fraction) or None."""
    if text is None:
        return None
    match = _RATE.match(text)
    if match:
        return "rate", Fraction(match.group(1) or 1)
    try:
        return "value", Fraction(int(text))
    except ValueError:
        raise InputError(f"--q takes an integer or a rate like '1/2m', got {text!r}") from None


def _load(args):
    if bool(args.scene) == bool(args.builtin):
        raise InputError("give exactly one of --scene FILE or --builtin NAME")
    return load_scene(args.scene) if args.scene else builtin_scene(args.builtin)


def _as_quasi(chi) -> QuasiPoly:
    return chi if isinstance(chi, QuasiPoly) else QuasiPoly.from_poly(chi)


def _apply_q(chi, q):
    """Substitute q = rate*m symbolically; plain values are applied at evaluation."""
    if q is None or q[0] != "rate":
        return chi
    return QuasiPoly(b.substitute_q(q[1]) for b in _as_quasi(chi).branches)


def _chi_json(chi) -> dict:
    chi = _as_quasi(chi)
    if chi.period == 1:
        return {"period": 1, "polynomial": str(chi.branches[0])}
    return {"period": chi.period, "branches": [str(b) for b in chi.branches]}


def _evaluate(chi, m, q) -> str:
    qv = Fraction(0)
    if q is not None:
        qv = q[1] if q[0] == "value" else Fraction(0)
    value = _as_quasi(chi).evaluate(m, qv)
    return str(value.to_fraction()) if value.is_rational() else str(value)


def _render_chi(chi) -> list[str]:
    chi = _as_quasi(chi)
    if chi.period == 1:
        return [f"χ = {chi.branches[0]}"]
    return [f"χ = quasi-polynomial of period {chi.period}:"] + [
        f"  m ≡ {r} (mod {chi.period}): {b}" for r, b in enumerate(chi.branches)
    ]


# -- commands -----------------------------------------------------------------------


def cmd_chi(args) -> tuple[int, dict, list[str]]:
    scene = _load(args)
    m, q = _parse_m(args.m), _parse_q(args.q)
    chi = _apply_q(scene.chi(), q)
    report = {"scene": scene.name, "chi": _chi_json(chi)}
    lines = [f"scene: {scene.name}"] + _render_chi(chi)
    if m is not None:
        value = _evaluate(chi, m, q)
        report["value"] = {"m": m, "q": args.q or "0", "chi": value}
        lines.append(f"χ(m={m}, q={args.q or 0}) = {value}")
    return EXIT_OK, report, lines


def _contribution_entry(sector, raw: bool) -> dict:
    chi = sector_chi(sector)
    entry = {"label": sector.label, "dim": sector.dim, "prefactor": str(sector.prefactor)}
    if chi.is_rational():
        entry["contribution"] = _chi_json(chi.to_rational())
    else:
        entry["contribution"] = None
    if raw:
        branches = chi.branches if isinstance(chi, QuasiPoly) else (chi,)
        entry["raw"] = [
            {f"m^{a} q^{b}": {"order": c.order, "coeffs": [str(x) for x in c.coeffs]} for (a, b), c in br.terms.items()}
            for br in branches
        ]
    return entry


def cmd_breakdown(args) -> tuple[int, dict, list[str]]:
    scene = _load(args)
    p = scene.presentation
    rows = [_contribution_entry(s, args.sector_raw) for s in p.sectors]
    audit = degree_bound_audit(p)
    ident, twisted, total = identity_chi(p), twisted_chi(p), total_chi(p)
    report = {
        "scene": scene.name,
        "sectors": rows,
        "identity": _chi_json(ident),
        "twisted": _chi_json(twisted),
        "total": _chi_json(total),
        "degree_audit": audit.to_json(),
    }
    lines = [f"scene: {scene.name}", f"{'sector':<28} {'dim':>3} {'prefactor':>9}  contribution"]
    for row in rows:
        c = row["contribution"]
        text = "(cyclotomic; cancels against conjugates, see --sector-raw)" if c is None else (
            c["polynomial"] if c["period"] == 1 else f"quasi-polynomial, period {c['period']}"
        )
        lines.append(f"{row['label']:<28} {row['dim']:>3} {row['prefactor']:>9}  {text}")
        if args.sector_raw:
            for br in row["raw"]:
                for mono, coeffs in br.items():
                    lines.append(f"{'':<28}     {mono}: Q(zeta_{coeffs['order']}) {coeffs['coeffs']}")
    lines.append("-" * 60)
    for label, chi in (("identity", ident), ("twisted", twisted), ("total", total)):
        body = _render_chi(chi)
        lines.append(f"{label:<9} {body[0][4:] if len(body) == 1 else body[0]}")
        lines.extend(body[1:])
    lines.append(
        f"degree audit: {'pass' if audit.passed else 'FAIL'}"
        f" (twisted degree {'-inf' if audit.twisted_degree is None else audit.twisted_degree})"
    )
    if args.m is not None:
        m, q = _parse_m(args.m), _parse_q(args.q)
        if m is not None:
            for key, chi in (("identity", ident), ("twisted", twisted), ("total", total)):
                report[key]["value"] = _evaluate(chi, m, q)
            lines.append(
                "at m={}: identity {}, twisted {}, total {}".format(
                    m, report["identity"]["value"], report["twisted"]["value"], report["total"]["value"]
                )
            )
    code = EXIT_OK if audit.passed else EXIT_INVARIANT
    return code, report, lines


def cmd_asymptotics(args) -> tuple[int, dict, list[str]]:
    scene = _load(args)
    profile = invariance_verdict(scene.presentation)
    report = {"scene": scene.name, "profile": profile.to_json()}
    td = "-inf" if profile.twisted_max_degree is None else profile.twisted_max_degree
    lines = [
        f"scene: {scene.name}",
        f"n                         {profile.ambient_dim}",
        f"s (generic stabilizer)    {profile.generic_stab}",
        f"degree in m               {profile.degree}",
        f"leading coeff (total)     {profile.leading}",
        f"leading coeff (identity)  {profile.identity_leading}",
        f"x s normalized (coarse)   {profile.coarse_normalized}",
        f"twisted max degree        {td}",
    ]
    return EXIT_OK, report, lines


def cmd_threshold(args) -> tuple[int, dict, list[str]]:
    scene = _load(args)
    if scene.curve is None:
        raise InputError("threshold needs an orbifold_curve scene")
    rep = threshold_report(scene.curve, args.kmax, scene.ample_degree)
    data = rep.to_json()
    lines = [
        f"scene: {scene.name}  curve {rep.curve}, ample degree {rep.ample_degree}",
        f"deg K_orb / a = {rep.orbifold_value}   coarse (2g-2)/a = {rep.coarse_value}",
        f"{'k':>3} {'lambda* full':>14} {'lambda* identity':>17} {'demailly (id)':>14}  verdict",
    ]
    for row in data["rows"]:
        lines.append(
            f"{row['k']:>3} {str(row['lambda_full']):>14} {str(row['lambda_identity']):>17}"
            f" {str(row['lambda_demailly_identity']):>14}  {row['verdict']}"
        )
    lines.append(f"verdict: {rep.verdict}; {rep.assumption}")
    code = EXIT_OK if rep.verdict == "equal" else EXIT_MISMATCH
    return code, {"scene": scene.name, "threshold": data}, lines


def cmd_verify(args) -> tuple[int, dict, list[str]]:
    try:
        grid = parse_grid(args.grid or "")
    except ValueError as exc:
        raise InputError(str(exc)) from None
    report = cross_check(args.family, grid)
    data = report.to_json()
    if not args.json:
        data.pop("engine")
        data.pop("oracle")
    lines = [
        f"family {args.family}, grid {grid or 'default'}: {report.cases} cases,"
        f" {len(report.expected_errors)} rejected presentations, {len(report.mismatches)} mismatches"
    ]
    for miss in report.mismatches[:50]:
        lines.append(f"  MISMATCH {miss['case']}: engine {miss['engine']} vs oracle {miss['oracle']}")
    lines.append("PASS" if report.passed else "FAIL")
    return (EXIT_OK if report.passed else EXIT_MISMATCH), data, lines


def cmd_list_scenes(args) -> tuple[int, dict, list[str]]:
    data = {name: desc for name, (desc, _) in BUILTINS.items()}
    lines = [f"{name:<14} {desc}" for name, desc in data.items()]
    return EXIT_OK, {"scenes": data}, lines


def cmd_export(args) -> tuple[int, dict, list[str]]:
    scene = _load(args)
    doc = export_presentation(scene.presentation)
    return EXIT_OK, doc, [json.dumps(doc, indent=2)]


COMMANDS = {
    "chi": (cmd_chi, "exact Euler characteristic in m and q"),
    "breakdown": (cmd_breakdown, "per-sector contributions and degree audit"),
    "asymptotics": (cmd_asymptotics, "leading coefficients, total vs identity"),
    "threshold": (cmd_threshold, "critical jet slopes on an orbifold curve"),
    "verify": (cmd_verify, "cross-check the engine against a counting oracle"),
    "list-scenes": (cmd_list_scenes, "show the builtin scenes"),
    "export": (cmd_export, "print a scene as an explicit sector list"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="orbirr", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        cmd = sub.add_parser(name, help=help_text)
        cmd.add_argument("--json", action="store_true", help="machine-readable report")
        if name == "verify":
            cmd.add_argument("family", choices=sorted(FAMILIES))
            cmd.add_argument("--grid", default="", help='bounds such as "r<=6,k<=30"')
            continue
        if name == "list-scenes":
            continue
        cmd.add_argument("--scene", help="scene JSON file")
        cmd.add_argument("--builtin", help="builtin scene, optionally name:key=value,...")
        if name in ("chi", "breakdown"):
            cmd.add_argument("--m", help="integer value or 'symbolic' (default)")
            cmd.add_argument("--q", help="integer value or a rate such as '1/2m'")
        if name == "breakdown":
            cmd.add_argument("--sector-raw", action="store_true", help="show cyclotomic sector terms")
        if name == "threshold":
            cmd.add_argument("--kmax", type=int, default=6)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    handler = COMMANDS[args.command][0]
    try:
        code, report, lines = handler(args)
    except InvariantViolation as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except (InputError, SceneError, PresentationError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if args.json:
        print(json.dumps(report, indent=2, sort_keys=True))
    else:
        print("\n".join(lines))
    return code


if __name__ == "__main__":
    sys.exit(main())
