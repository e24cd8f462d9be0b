"""Scene files: JSON schema validation, construction, export and the builtin library."""
from __future__ import annotations

import copy
import json
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
from pathlib import Path

import jsonschema

from .algebra import Cyclotomic, QuasiPoly, TwistPoly, root_of_unity
from .kawasaki import (
    FiberPiece,
    NormalSummand,
    OrbifoldPresentation,
    Sector,
    total_chi,
    with_trivial_gerbe,
)
from .scenes import (
    BundleSpec,
    ConePoint,
    OrbifoldCurve,
    cyclic_quotient_p1,
    cyclic_quotient_pn,
    gg_jet_curve,
    hypersurface,
    orbifold_curve,
    partition_quasipoly,
    projective_space,
)

__all__ = [
    "BUILTINS",
    "Scene",
    "SceneError",
    "builtin_scene",
    "build_scene",
    "export_presentation",
    "load_scene",
    "parse_presentation",
    "parse_rational",
    "rational_text",
    "scene_schema",
]


class SceneError(ValueError):
    """Malformed scene input (schema or semantic)."""


def parse_rational(value) -> Fraction:
    if isinstance(value, bool):
        raise SceneError(f"not a rational: {value!r}")
    try:
        return Fraction(value)
    except (TypeError, ValueError, ZeroDivisionError):
        raise SceneError(f"not a rational: {value!r}") from None


def rational_text(x) -> str:
    return str(Fraction(x))


_SCHEMA = None


def scene_schema() -> dict:
    global _SCHEMA
    if _SCHEMA is None:
        text = resources.files("orbirr").joinpath("scene.schema.json").read_text()
        _SCHEMA = json.loads(text)
    return _SCHEMA


def validate_document(doc: dict) -> None:
    try:
        jsonschema.validate(doc, scene_schema())
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise SceneError(f"scene schema violation at {where}: {exc.message}") from None


@dataclass(frozen=True)
class Scene:
    """A built scene: presentation plus what the commands need around it.

    ``jet_order`` is set for symbolic jet scenes, whose Euler characteristic
    is p_k(m) times that of the presentation.
    """

    name: str
    presentation: OrbifoldPresentation
    bundle: BundleSpec
    curve: OrbifoldCurve | None = None
    ample_degree: Fraction | None = None
    jet_order: int | None = None
    pullback: bool = True

    def chi(self):
        chi = total_chi(self.presentation)
        if self.jet_order is not None:
            chi = partition_quasipoly(self.jet_order) * chi
        return chi


# -- characters, bundles, sectors ---------------------------------------------------


def _character_from_json(obj) -> Cyclotomic:
    if obj is None:
        return Cyclotomic.rational(1)
    if "root" in obj:
        n, j = obj["root"]
        if n < 1:
            raise SceneError("root of unity order must be positive")
        return root_of_unity(n, j)
    coeffs = [parse_rational(c) for c in obj["coeffs"]]
    return Cyclotomic(obj["order"], coeffs)


def _character_to_json(c: Cyclotomic) -> dict:
    return {"order": c.order, "coeffs": [rational_text(x) for x in c.coeffs]}


def _line_from_json(obj: dict, q_coeff=None) -> BundleSpec:
    return BundleSpec.line(
        parse_rational(obj.get("coeff", 0)),
        obj.get("isotropy_weights", ()),
        parse_rational(obj["twist_q_coeff"]) if "twist_q_coeff" in obj else q_coeff,
    )


def _bundle_from_json(obj: dict | None) -> tuple[BundleSpec, dict]:
    if obj is None:
        return BundleSpec.line(0), {}
    q = parse_rational(obj["twist_q_coeff"]) if "twist_q_coeff" in obj else None
    kind = obj["kind"]
    if kind == "line":
        return _line_from_json(obj), {}
    if kind == "virtual_sum":
        summands = [(s.get("multiplicity", 1), _line_from_json(s["line"])) for s in obj["summands"]]
        return BundleSpec.virtual_sum(summands, q), {}
    extra = {"m": obj.get("m"), "grading": obj.get("grading", "weight")}
    return BundleSpec.gg_jet(obj["k"], q), extra


def _integral_coeff(bundle: BundleSpec, kind: str) -> int:
    if bundle.kind != "line" or bundle.isotropy_weights or bundle.twist_q_coeff is not None:
        raise SceneError(f"{kind} scenes take a plain line bundle {{'kind': 'line', 'coeff': k}}")
    if bundle.coeff.denominator != 1:
        raise SceneError(f"{kind} scenes need an integer line bundle degree")
    return int(bundle.coeff)


def _sector_from_json(obj: dict) -> Sector:
    q = obj.get("q_coeff")
    return Sector(
        obj["label"],
        dim=obj["dim"],
        fundamental_degree=parse_rational(obj["fundamental_degree"]),
        prefactor=parse_rational(obj["prefactor"]),
        group_order=obj.get("group_order", 1),
        tangent_roots_plus=[parse_rational(x) for x in obj.get("tangent_roots_plus", ())],
        tangent_roots_minus=[parse_rational(x) for x in obj.get("tangent_roots_minus", ())],
        normals=[
            NormalSummand(parse_rational(n["c1_coeff"]), parse_rational(n["theta"]))
            for n in obj.get("normals", ())
        ],
        bundle=[
            FiberPiece(
                parse_rational(p["c1_coeff"]),
                _character_from_json(p.get("character")),
                p.get("character_m_weight", 0),
                p.get("multiplicity", 1),
            )
            for p in obj.get("bundle", ())
        ],
        ample_coeff=parse_rational(obj.get("ample_coeff", 0)),
        q_coeff=None if q is None else parse_rational(q),
        component=obj.get("component", 0),
    )


def _sector_to_json(s: Sector) -> dict:
    out = {
        "label": s.label,
        "dim": s.dim,
        "fundamental_degree": rational_text(s.fundamental_degree),
        "prefactor": rational_text(s.prefactor),
        "group_order": s.group_order,
        "tangent_roots_plus": [rational_text(x) for x in s.tangent_roots_plus],
        "tangent_roots_minus": [rational_text(x) for x in s.tangent_roots_minus],
        "normals": [
            {"c1_coeff": rational_text(n.c1_coeff), "theta": rational_text(n.theta)} for n in s.normals
        ],
        "bundle": [
            {
                "c1_coeff": rational_text(p.c1_coeff),
                "character": _character_to_json(p.character),
                "character_m_weight": p.character_m_weight,
                "multiplicity": p.multiplicity,
            }
            for p in s.bundle
        ],
        "ample_coeff": rational_text(s.ample_coeff),
        "component": s.component,
    }
    if s.q_coeff is not None:
        out["q_coeff"] = rational_text(s.q_coeff)
    return out


def export_presentation(p: OrbifoldPresentation) -> dict:
    """Custom-kind scene document reproducing ``p`` exactly."""
    params = {
        "ambient_dim": p.ambient_dim,
        "generic_stab": p.generic_stab,
        "component_stabs": list(p.component_stabs),
        "self_conjugate": p.self_conjugate,
    }
    if p.coarse_ample_degree is not None:
        params["coarse_ample_degree"] = rational_text(p.coarse_ample_degree)
    return {
        "name": p.name,
        "kind": "custom",
        "parameters": params,
        "sectors": [_sector_to_json(s) for s in p.sectors],
    }


def parse_presentation(doc: dict) -> OrbifoldPresentation:
    """Inverse of ``export_presentation`` (validates the document first)."""
    validate_document(doc)
    if doc["kind"] != "custom":
        raise SceneError("only custom scenes carry an explicit presentation")
    return _custom(doc)


def _custom(doc: dict) -> OrbifoldPresentation:
    params = doc["parameters"]
    coarse = params.get("coarse_ample_degree")
    try:
        p = OrbifoldPresentation(
            doc["name"],
            params["ambient_dim"],
            tuple(_sector_from_json(s) for s in doc["sectors"]),
            generic_stab=params.get("generic_stab", 1),
            component_stabs=tuple(params.get("component_stabs", ())),
            self_conjugate=params.get("self_conjugate", True),
            coarse_ample_degree=None if coarse is None else parse_rational(coarse),
        )
    except ValueError as exc:
        raise SceneError(str(exc)) from None
    return p.validate()


# -- building ------------------------------------------------------------------------


def build_scene(doc: dict) -> Scene:
    """Validate a scene document and construct its presentation."""
    validate_document(doc)
    try:
        scene = _build(doc)
    except SceneError:
        raise
    except ValueError as exc:
        raise SceneError(str(exc)) from None
    if "gerbe" in doc and doc["gerbe"] > 1:
        p = with_trivial_gerbe(scene.presentation, doc["gerbe"])
        scene = Scene(scene.name, p, scene.bundle, scene.curve, scene.ample_degree, scene.jet_order, scene.pullback)
    scene.presentation.validate()
    return scene


def _build(doc: dict) -> Scene:
    kind = doc["kind"]
    params = doc["parameters"]
    name = doc["name"]
    bundle, extra = _bundle_from_json(doc.get("bundle"))
    if kind == "custom":
        return Scene(name, _custom(doc), bundle, pullback=False)
    if kind == "orbifold_curve":
        return _build_curve(name, params, bundle, extra)
    k = _integral_coeff(bundle, kind)
    if kind == "projective_space":
        p, b = projective_space(params["n"], k)
    elif kind == "hypersurface":
        p, b = hypersurface(params["n"], params["d"], k)
    elif kind == "cyclic_quotient_p1":
        p, b = cyclic_quotient_p1(params["r"], tuple(params["rot"]), params.get("lin", 0), k)
    else:
        p, b = cyclic_quotient_pn(tuple(params["weights"]), params["r"], params.get("lin", 0), k)
    return Scene(name, p, b)


def _build_curve(name: str, params: dict, bundle: BundleSpec, extra: dict) -> Scene:
    cones = tuple(ConePoint(c["order"], c.get("label", "")) for c in params.get("cones", ()))
    curve = OrbifoldCurve(params["genus"], cones)
    a = parse_rational(params.get("ample_degree", 1))
    if bundle.kind == "gg_jet":
        if extra["m"] is not None:
            p, b = gg_jet_curve(bundle.k, curve, extra["m"], a, extra["grading"])
            return Scene(name, p, b, curve, a, pullback=False)
        if extra["grading"] != "weight":
            raise SceneError("symbolic jet scenes need the weight grading; give 'm' for the demailly one")
        p, b = orbifold_curve(curve, bundle=bundle, ample_degree=a)
        return Scene(name, p, b, curve, a, jet_order=bundle.k, pullback=False)
    p, b = orbifold_curve(curve, bundle=bundle, ample_degree=a)
    return Scene(name, p, b, curve, a)


def load_scene(path: str | Path) -> Scene:
    try:
        doc = json.loads(Path(path).read_text())
    except OSError as exc:
        raise SceneError(f"cannot read scene file: {exc}") from None
    except json.JSONDecodeError as exc:
        raise SceneError(f"scene file is not valid JSON: {exc}") from None
    return build_scene(doc)


# -- builtin library --------------------------------------------------------------------


def _line(coeff=0, weights=None) -> dict:
    out = {"kind": "line", "coeff": coeff}
    if weights:
        out["isotropy_weights"] = list(weights)
    return out


BUILTINS: dict[str, tuple[str, dict]] = {
    "p1": ("P^1 with O(k)", {"name": "p1", "kind": "projective_space", "parameters": {"n": 1}, "bundle": _line()}),
    "p2": ("P^2 with O(k)", {"name": "p2", "kind": "projective_space", "parameters": {"n": 2}, "bundle": _line()}),
    "p3": ("P^3 with O(k)", {"name": "p3", "kind": "projective_space", "parameters": {"n": 3}, "bundle": _line()}),
    "conic": ("plane conic with O(k)", {"name": "conic", "kind": "hypersurface", "parameters": {"n": 2, "d": 2}, "bundle": _line()}),
    "cubic": ("plane cubic (elliptic curve)", {"name": "cubic", "kind": "hypersurface", "parameters": {"n": 2, "d": 3}, "bundle": _line()}),
    "quartic_k3": ("quartic K3 surface in P^3", {"name": "quartic_k3", "kind": "hypersurface", "parameters": {"n": 3, "d": 4}, "bundle": _line()}),
    "football": (
        "[P^1/Z2], z1 -> -z1, with O(2)",
        {"name": "football", "kind": "cyclic_quotient_p1", "parameters": {"r": 2, "rot": [0, 1], "lin": 0}, "bundle": _line(2)},
    ),
    "z3_quotient": (
        "[P^1/Z3] with O(3)",
        {"name": "z3_quotient", "kind": "cyclic_quotient_p1", "parameters": {"r": 3, "rot": [0, 1], "lin": 0}, "bundle": _line(3)},
    ),
    "z5_plane": (
        "[P^2/Z5] with weights (0,1,2), O(0)",
        {"name": "z5_plane", "kind": "cyclic_quotient_pn", "parameters": {"r": 5, "weights": [0, 1, 2], "lin": 0}, "bundle": _line()},
    ),
    "z4_plane": (
        "[P^2/Z4] with weights (0,0,1): a fixed line and a fixed point",
        {"name": "z4_plane", "kind": "cyclic_quotient_pn", "parameters": {"r": 4, "weights": [0, 0, 1], "lin": 0}, "bundle": _line()},
    ),
    "spindle_23": (
        "genus-0 curve with cone points of orders 2 and 3, pulled-back O(1)",
        {
            "name": "spindle_23",
            "kind": "orbifold_curve",
            "parameters": {"genus": 0, "cones": [{"order": 2}, {"order": 3}], "ample_degree": 1},
            "bundle": _line(1),
        },
    ),
    "triangle_237": (
        "(2,3,7) triangle orbifold, ample degree 1",
        {
            "name": "triangle_237",
            "kind": "orbifold_curve",
            "parameters": {"genus": 0, "cones": [{"order": 2}, {"order": 3}, {"order": 7}], "ample_degree": 1},
            "bundle": _line(),
        },
    ),
    "genus2": (
        "smooth genus-2 curve, ample degree 2 (A = K)",
        {"name": "genus2", "kind": "orbifold_curve", "parameters": {"genus": 2, "ample_degree": 2}, "bundle": _line()},
    ),
    "genus1": (
        "elliptic curve, ample degree 1",
        {"name": "genus1", "kind": "orbifold_curve", "parameters": {"genus": 1, "ample_degree": 1}, "bundle": _line()},
    ),
}


def _coerce_value(text: str):
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return rational_text(Fraction(text))
    except (ValueError, ZeroDivisionError):
        raise SceneError(f"bad parameter value {text!r}") from None


def builtin_document(spec: str) -> dict:
    """Scene document for "name" or "name:key=value,...".

    Keys name scene parameters; ``k`` (or ``c``) sets the line bundle
    degree and ``gerbe`` adds a trivial gerbe.
    """
    name, _, rest = spec.partition(":")
    if name not in BUILTINS:
        raise SceneError(f"unknown builtin scene {name!r}; try list-scenes")
    doc = copy.deepcopy(BUILTINS[name][1])
    for item in filter(None, (s.strip() for s in rest.split(","))):
        key, eq, value = item.partition("=")
        if not eq:
            raise SceneError(f"builtin parameters look like key=value, got {item!r}")
        value = _coerce_value(value.strip())
        key = key.strip()
        if key in ("k", "c"):
            doc["bundle"]["coeff"] = value
        elif key == "gerbe":
            doc["gerbe"] = value
        elif key in doc["parameters"] or key in ("lin", "ample_degree"):
            doc["parameters"][key] = value
        else:
            raise SceneError(f"builtin {name!r} has no parameter {key!r}")
    return doc


def builtin_scene(spec: str) -> Scene:
    return build_scene(builtin_document(spec))
