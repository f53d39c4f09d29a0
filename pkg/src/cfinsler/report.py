"""Per-point geometry records, identity suites and their serialization."""

from __future__ import annotations

import csv
import io
import json
import math

import numpy as np

from . import frame as frame_mod
from .classify import classify_curvature
from .curvature import Curvature
from .frame import Frame
from .geometry import Geometry, metric_compatibility_residuals
from .metrics import MetricSpec, validate_homogeneity
from .tolerance import ToleranceConfig

SCHEMA_VERSION = 1
SCALARS = ("A", "B", "J", "U", "V", "X", "O", "Y", "E", "H")
SECTIONAL = ("Kv_l", "Kv_m", "Kh_lambda", "Kh_mu")


# -- identity suites ------------------------------------------------------------


def _homogeneity(cv: Curvature) -> dict:
    geo = cv.geo
    return validate_homogeneity(geo.spec, geo.ctx.z, geo.ctx.eta)


def _sectional(cv: Curvature) -> dict:
    return {k: v["disagreement"] for k, v in cv.sectional_curvatures().items()}


def _curvature_structure(cv: Curvature) -> dict:
    out = {f"symmetry/{k}": v for k, v in cv.symmetry_residuals().items()}
    out.update({f"s-structure/{k}": v for k, v in cv.S_structure_residuals().items()})
    return out


SUITES = {
    "homogeneity": _homogeneity,
    "metric-compatibility": lambda cv: metric_compatibility_residuals(cv.geo),
    "frames": lambda cv: frame_mod.frame_identity_residuals(cv.frame),
    "connection-curvature": lambda cv: cv.connection_curvature_residuals(),
    "ricci": lambda cv: cv.ricci_identity_residuals(),
    "conjugate-frame-derivatives": lambda cv: cv.conjugate_frame_derivative_residuals(),
    "frame-derivatives": lambda cv: cv.frame_derivative_residuals(),
    "curvature-structure": _curvature_structure,
    "sectional": _sectional,
    "hh-decomposition": lambda cv: {"residual": cv.hh_decomposition()["residual"]},
    "bianchi": lambda cv: cv.bianchi_residuals(),
    "vertical-invariant": lambda cv: {"I_|0 = -I": cv.vertical_invariant_homogeneity_residual()},
}

# alternative names accepted by --suite
SUITE_ALIASES = {
    "prop21": "connection-curvature",
    "prop22": "ricci",
    "prop42": "conjugate-frame-derivatives",
    "prop43": "frame-derivatives",
    "theorem41": "vertical-invariant",
}


def suite_name(name: str) -> str:
    return SUITE_ALIASES.get(name, name)


def run_suites(cv: Curvature, names=None) -> dict:
    """Residual dictionaries for the selected suites (all when ``names`` is None)."""
    names = list(SUITES) if not names else [suite_name(n) for n in names]
    unknown = [n for n in names if n not in SUITES]
    if unknown:
        raise KeyError(f"unknown suite(s) {unknown}; choose from {', '.join(SUITES)}")
    return {n: SUITES[n](cv) for n in names}


def suite_summary(results: dict, tol: float) -> dict:
    out = {}
    for name, items in results.items():
        worst_item = max(items, key=items.get)
        worst = float(items[worst_item])
        out[name] = {"max_residual": worst, "worst_item": worst_item, "pass": worst <= tol}
    return out


# -- records --------------------------------------------------------------------------


def _cval(x) -> complex:
    return complex(x.value) if hasattr(x, "value") else complex(x)


def build(spec: MetricSpec, z, eta, order: int = 6) -> Curvature:
    return Curvature(Frame(Geometry(spec, z, eta, order)))


def point_record(cv: Curvature, tol: ToleranceConfig | None = None, suites: bool = True) -> dict:
    """Everything the report command prints for one point."""
    geo, fr = cv.geo, cv.frame
    g = np.asarray(geo.g.value)
    inv = cv.invariants()
    rec = {
        "point": {"z": list(geo.ctx.z), "eta": list(geo.ctx.eta)},
        "L": _cval(geo.L).real,
        "F": _cval(fr.F).real,
        "g": [[complex(v) for v in row] for row in g],
        "det_g": _cval(geo.det).real,
        "scalars": {k: _cval(getattr(fr, k)) for k in SCALARS},
        "invariants": {k: v.real for k, v in inv.items()},
        "invariants_imag": {k: v.imag for k, v in inv.items()},
        "sectional": cv.sectional_curvatures(),
    }
    cl = classify_curvature(cv, tol)
    rec["classification"] = {k: {"verdict": v["verdict"], "residual": v["residual"]}
                             for k, v in cl["flags"].items()}
    rec["notes"] = {"trichotomy": cl["notes"]["trichotomy"]["branch"], "I_|k": cl["notes"]["I_|k"],
                    "Kfit": cl["flags"]["special_form"]["witness"]["Kfit"],
                    "Phi": cl["notes"]["Phi"], "Omega": cl["notes"]["Omega"],
                    "violations": cl["violations"]}
    if suites:
        rec["identities"] = {k: max(v.values()) for k, v in run_suites(cv).items()}
    return rec


def error_record(z, eta, exc: Exception) -> dict:
    return {"point": {"z": list(z), "eta": list(eta)}, "error": f"{type(exc).__name__}: {exc}"}


def metric_echo(spec: MetricSpec) -> dict:
    return {"name": spec.name, "params": {k: v for k, v in spec.params},
            "domain": [c.description for c in spec.domain], "source": spec.source}


def document(command: str, spec: MetricSpec, config: dict, body: dict) -> dict:
    return {"schema_version": SCHEMA_VERSION, "command": command, "metric": metric_echo(spec),
            "config": config, **body}


# -- serialization ---------------------------------------------------------------------


def _float(x: float) -> str:
    if not math.isfinite(x):
        return "null"
    return format(x, ".17g")


def _plain(obj):
    """Complex numbers become [re, im]; numpy scalars become Python scalars."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    return obj


def dumps(obj, indent: int = 2) -> str:
    """JSON text with every float written to 17 significant digits."""

    def enc(o, level):
        pad = " " * (indent * (level + 1))
        end = " " * (indent * level)
        if isinstance(o, dict):
            if not o:
                return "{}"
            items = [f"{pad}{json.dumps(k)}: {enc(v, level + 1)}" for k, v in o.items()]
            return "{\n" + ",\n".join(items) + "\n" + end + "}"
        if isinstance(o, list):
            if not o:
                return "[]"
            if all(not isinstance(v, (dict, list)) for v in o):
                return "[" + ", ".join(enc(v, level) for v in o) + "]"
            return "[\n" + ",\n".join(pad + enc(v, level + 1) for v in o) + "\n" + end + "]"
        if isinstance(o, bool) or o is None:
            return json.dumps(o)
        if isinstance(o, float):
            return _float(o)
        if isinstance(o, int):
            return str(o)
        return json.dumps(o)

    return enc(_plain(obj), 0) + "\n"


def flatten(rec: dict, prefix: str = "") -> dict:
    """Flat column -> value mapping; complex values split into _re/_im."""
    out = {}
    for k, v in rec.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            out.update(flatten(v, key + "."))
        elif isinstance(v, (list, tuple)):
            for i, x in enumerate(v):
                if isinstance(x, dict):
                    out.update(flatten(x, f"{key}{i}."))
                else:
                    out.update(flatten({str(i): x}, key))
        elif isinstance(v, complex):
            out[key + "_re"] = v.real
            out[key + "_im"] = v.imag
        else:
            out[key] = v
    return out


def _cell(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return _float(v) if math.isfinite(v) else ""
    if v is None:
        return ""
    return str(v)


def to_csv(rows: list, header: list | None = None) -> str:
    flat = [flatten(r) for r in rows]
    if header is None:
        header = []
        for r in flat:
            header.extend(k for k in r if k not in header)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in flat:
        w.writerow([_cell(r.get(k)) for k in header])
    return buf.getvalue()
