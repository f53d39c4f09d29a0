"""Per-point and aggregated classification with three-valued verdicts."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .curvature import Curvature
from .errors import CFinslerError, DomainError
from .frame import Frame, kahler_scalar_test
from .geometry import Geometry, max_abs, rel_residual
from .metrics import MetricSpec, pulled_back
from .tolerance import INDETERMINATE, NO, YES, ToleranceConfig, both

__all__ = [
    "ToleranceConfig", "Sampler", "classify_point", "classify_curvature", "aggregate",
    "sample_points", "linear_change_invariance", "random_linear_change",
    "implication_violations", "FLAGS",
]

FLAGS = ("purely_hermitian", "weakly_kahler", "kahler", "holomorphic_spray", "berwald",
         "landsberg", "g_landsberg", "weak_symmetry", "special_form")

# (antecedent, consequent) pairs that must never read yes -> no
IMPLICATIONS = (
    ("berwald", "kahler"),
    ("kahler", "weakly_kahler"),
    ("berwald", "g_landsberg"),
    ("g_landsberg", "landsberg"),
    ("berwald", "landsberg"),
    ("kahler", "holomorphic_spray"),
)


def _flag(verdict: str, residual: float, **witness) -> dict:
    return {"verdict": verdict, "residual": float(residual), "witness": witness}


def _c(x) -> complex:
    return complex(x.value) if hasattr(x, "value") else complex(x)


def _trichotomy(cv: Curvature, tol: ToleranceConfig) -> dict:
    """Which branch of the A/B trichotomy the point satisfies."""
    fr = cv.frame
    F, A, B = fr.F, fr.A, fr.B
    J, V, Y, H = (fr.horizontal[k] for k in "JVYH")
    JY, VH = J + Y, V + H
    Fv = _c(F).real
    a_size = abs(_c(A)) * Fv
    b_size = abs(_c(B)) * Fv
    scale = max(1.0, abs(_c(JY)), abs(_c(VH)))

    ii_res = max(abs(_c(fr.m(JY) - VH / F)), abs(_c(fr.m(VH) + A * JY))) * Fv / scale
    Bk = cv.geo.delta(B)
    rhs = ((0.5 * B * JY + fr.m(JY) - VH / F) * fr.l_dn
           + (B * VH + fr.m(VH) + A * JY) * fr.m_dn)
    iii_res = max(abs(_c(F * fr.l(JY) - 0.5 * JY)) / scale,
                  abs(_c(F * fr.l(VH) + 0.5 * VH)) / scale,
                  rel_residual(Bk - rhs, Bk, rhs))

    a_zero = tol.verdict(a_size, "trichotomy")
    b_zero = tol.verdict(b_size, "trichotomy")
    negate = {YES: NO, NO: YES, INDETERMINATE: INDETERMINATE}
    branches = {
        "i": a_zero,
        "ii": both(both(negate[a_zero], b_zero), tol.verdict(ii_res, "trichotomy")),
        "iii": both(both(negate[a_zero], negate[b_zero]), tol.verdict(iii_res, "trichotomy")),
    }
    held = [k for k, v in branches.items() if v == YES]
    if held:
        branch = held[0]
    elif any(v == INDETERMINATE for v in branches.values()):
        branch = INDETERMINATE
    else:
        branch = "none"
    return {"branch": branch, "branches": branches, "F|A|": a_size, "F|B|": b_size,
            "residual_ii": ii_res, "residual_iii": iii_res}


def classify_curvature(cv: Curvature, tol: ToleranceConfig | None = None) -> dict:
    """Classification flags from already-built curvature data."""
    tol = tol or ToleranceConfig()
    fr, geo = cv.frame, cv.geo
    Fv = _c(fr.F).real
    flags = {}

    herm = Fv * max(max_abs(geo.C), abs(_c(fr.A)))
    flags["purely_hermitian"] = _flag(tol.verdict(herm, "purely_hermitian"), herm,
                                      A=_c(fr.A), B=_c(fr.B))
    kt = kahler_scalar_test(fr, tol)
    flags["weakly_kahler"] = _flag(kt["weakly_kahler"]["verdict"], kt["weakly_kahler"]["residual"],
                                   torsion_residual=kt["weakly_kahler"]["torsion_residual"])
    flags["kahler"] = _flag(kt["kahler"]["verdict"], kt["kahler"]["residual"],
                            torsion_residual=kt["kahler"]["torsion_residual"])
    spray = rel_residual(geo.dG_bar, geo.N)
    flags["holomorphic_spray"] = _flag(tol.verdict(spray, "holomorphic_spray"), spray)
    flags["berwald"] = _flag(both(flags["kahler"]["verdict"], flags["holomorphic_spray"]["verdict"]),
                             max(flags["kahler"]["residual"], spray))
    lb = cv.landsberg()
    flags["landsberg"] = _flag(tol.verdict(lb["criterion"], "landsberg"), lb["criterion"],
                               berwald_minus_rund=lb["BL-RL"])
    flags["g_landsberg"] = _flag(both(flags["landsberg"]["verdict"], flags["holomorphic_spray"]["verdict"]),
                                 max(lb["criterion"], spray))
    ws = cv.weak_symmetry()
    flags["weak_symmetry"] = _flag(tol.verdict(ws, "weak_symmetry"), ws)
    sf = cv.special_form()
    flags["special_form"] = _flag(tol.verdict(sf["fit_residual"], "special_form"), sf["fit_residual"],
                                  Kfit=sf["Kfit"], Kfit_vertical_derivative=sf["Kfit_vertical_derivative"])

    sp = cv.antiholomorphic_spray()
    spray_agrees = (tol.verdict(spray, "holomorphic_spray") == YES) == \
        (tol.verdict(sp["frame_residual"], "holomorphic_spray") == YES)
    notes = {
        "trichotomy": _trichotomy(cv, tol),
        "I_|k": cv.I_horizontal(),
        "spray_frame_consistent": spray_agrees,
        "spray_frame_residual": sp["frame_residual"],
        **cv.phi_omega(),
    }
    out = {"flags": flags, "notes": notes}
    out["violations"] = implication_violations(out)
    return out


def implication_violations(entry: dict) -> list[str]:
    """Inclusion-chain consistency; an empty list means consistent."""
    flags = entry["flags"]
    bad = [f"{a} => {b}" for a, b in IMPLICATIONS
           if flags[a]["verdict"] == YES and flags[b]["verdict"] == NO]
    if flags["purely_hermitian"]["verdict"] == YES:
        w = flags["purely_hermitian"]["witness"]
        if abs(w["B"]) > 10 * max(abs(w["A"]), 1e-12) and abs(w["B"]) > 1e-6:
            bad.append("purely_hermitian => A = B = 0")
    return bad


def classify_point(spec: MetricSpec, z, eta, order: int = 6,
                   tol: ToleranceConfig | None = None) -> dict:
    cv = Curvature(Frame(Geometry(spec, z, eta, order)))
    out = classify_curvature(cv, tol)
    out["point"] = {"z": [complex(v) for v in z], "eta": [complex(v) for v in eta]}
    return out


# -- sampling and aggregation ----------------------------------------------------


@dataclass(frozen=True)
class Sampler:
    """Seeded sampler: z uniform in a box, eta complex normal.

    Draws closer than ``margin`` (scale-free) to an excluded set are rejected;
    derivatives there are dominated by cancellation between huge terms. So are
    draws where g is not definite or has condition number above ``max_cond``:
    curvature applies g^-1 several times, and roundoff grows like cond(g)^2.
    """

    count: int = 20
    seed: int = 0
    box: tuple = (-1.0, 1.0)
    eta_floor: float = 1e-3
    oversample: int = 100
    margin: float = 0.1
    max_cond: float = 1e3

    def draw(self, rng: np.random.Generator):
        lo, hi = self.box
        z = tuple(complex(*rng.uniform(lo, hi, 2)) for _ in range(2))
        while True:
            e = tuple(complex(*rng.normal(size=2)) for _ in range(2))
            if min(abs(x) for x in e) >= self.eta_floor:
                return z, e


def conditioned(spec: MetricSpec, z, eta, max_cond: float) -> bool:
    ft = Geometry(spec, z, eta, 2, require_definite=False).ft
    return bool(ft.positive_definite) and np.linalg.cond(ft.g.value) <= max_cond


def sample_points(spec: MetricSpec, sampler: Sampler) -> list:
    """Admitted points in draw order; raises after ``oversample * count`` attempts."""
    rng = np.random.default_rng(sampler.seed)
    pts = []
    for _ in range(sampler.oversample * sampler.count):
        z, e = sampler.draw(rng)
        if not (spec.admits(z, e) and spec.clearance(z, e) >= sampler.margin):
            continue
        if conditioned(spec, z, e, sampler.max_cond):
            pts.append((z, e))
            if len(pts) == sampler.count:
                return pts
    raise DomainError(
        f"only {len(pts)} of {sampler.count} requested points admitted by {spec.name} "
        f"after {sampler.oversample * sampler.count} draws")


def thread_count() -> int:
    try:
        return max(1, int(os.environ.get("CFINSLER_THREADS", "1")))
    except ValueError:
        return 1


def parallel_map(fn, items: list) -> list:
    """Order-preserving map, threaded when CFINSLER_THREADS > 1."""
    n = thread_count()
    if n == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


def _fold(entries: list) -> dict:
    agg = {}
    for name in FLAGS:
        verdicts = [e["flags"][name]["verdict"] for e in entries]
        n = len(verdicts)
        yes = sum(v == YES for v in verdicts)
        no = sum(v == NO for v in verdicts)
        if yes == n:
            summary = "unanimous yes"
        elif no == n:
            summary = "unanimous no"
        elif yes * 2 > n:
            summary = "majority yes"
        elif no * 2 > n:
            summary = "majority no"
        else:
            summary = "mixed"
        agg[name] = {"summary": summary, "fraction_yes": yes / n if n else 0.0,
                     "fraction_no": no / n if n else 0.0,
                     "worst_residual": max(e["flags"][name]["residual"] for e in entries)}
    branches = [e["notes"]["trichotomy"]["branch"] for e in entries]
    agg["trichotomy"] = {b: branches.count(b) for b in sorted(set(branches))}
    agg["max_I_|k"] = max(e["notes"]["I_|k"] for e in entries)
    agg["violations"] = sorted({v for e in entries for v in e["violations"]})
    return agg


def aggregate(spec: MetricSpec, sampler: Sampler, order: int = 6,
              tol: ToleranceConfig | None = None) -> dict:
    tol = tol or ToleranceConfig()
    pts = sample_points(spec, sampler)
    entries = parallel_map(lambda p: classify_point(spec, p[0], p[1], order, tol), pts)
    return {"points": entries, "aggregate": _fold(entries)}


# -- invariance under constant linear changes --------------------------------------


def linear_change_invariance(spec: MetricSpec, z, eta, M, order: int = 6) -> dict:
    """Relative differences of I, K, W between the metric at (z, eta) and its
    pull-back by z' = M z evaluated at (M z, M eta)."""
    M = np.asarray(M, complex)
    z2 = tuple(M @ np.asarray(z, complex))
    e2 = tuple(M @ np.asarray(eta, complex))
    moved = pulled_back(spec, M)
    if not moved.admits(z2, e2):
        raise DomainError("mapped point is not admitted by the pulled-back metric")
    a = Curvature(Frame(Geometry(spec, z, eta, order))).invariants()
    b = Curvature(Frame(Geometry(moved, z2, e2, order))).invariants()
    out = {}
    for k in ("I", "K", "W"):
        out[k] = abs(a[k] - b[k]) / max(1.0, abs(a[k]), abs(b[k]))
    return out


def random_linear_change(rng: np.random.Generator, cond_max: float = 20.0) -> np.ndarray:
    """A random invertible complex 2x2 matrix with bounded condition number."""
    while True:
        M = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        if np.linalg.cond(M) < cond_max:
            return M


def check_order(order: int):
    if not 4 <= order <= 10:
        raise CFinslerError(f"order must be in [4, 10], got {order}")
