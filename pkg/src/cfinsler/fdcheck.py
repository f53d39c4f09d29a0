"""Finite-difference cross-checks of the jet derivatives and jet-order stability.

g is differenced from plain numeric evaluations of L (no jets involved).
N and L^i_{jk} need one more derivative than g, so they are differenced from
order-2 jet values of g at displaced base points; a second-order numeric
stencil on top of the first would be dominated by rounding.
"""

from __future__ import annotations

import numpy as np

from .curvature import Curvature
from .frame import Frame
from .geometry import Geometry, fundamental_tensor
from .jets import JetContext
from .metrics import MetricSpec, eval_L, eval_L_jet

DEFAULT_STEP = 1e-5


def _central(f, x, e, h, fourth: bool):
    if fourth:
        return (8 * (f(x + e) - f(x - e)) - (f(x + 2 * e) - f(x - 2 * e))) / (12 * h)
    return (f(x + e) - f(x - e)) / (2 * h)


def _wirtinger(f, x: np.ndarray, k: int, h: float, conj: bool = False, fourth: bool = False):
    """Central-difference d/dx_k (or d/dxbar_k) of f at complex vector x."""
    e = np.zeros_like(x)
    e[k] = h
    dre = _central(f, x, e, h, fourth)
    dim = _central(f, x, 1j * e, h, fourth)
    return 0.5 * (dre + 1j * dim) if conj else 0.5 * (dre - 1j * dim)


def fd_fundamental_tensor(spec: MetricSpec, z, eta, h: float = DEFAULT_STEP) -> np.ndarray:
    """g_{i jbar} from a mixed second-order stencil on L(z, eta)."""
    eta = np.asarray(eta, complex)
    scale = max(1.0, float(np.max(np.abs(eta))))
    hh = h * scale

    def L(e):
        return eval_L(spec, z, e)

    g = np.empty((2, 2), complex)
    for i in range(2):
        for j in range(2):
            g[i, j] = _wirtinger(
                lambda e, j=j: _wirtinger(L, e, j, hh, conj=True), eta, i, hh)
    return g


def _jet_g(spec: MetricSpec, z, eta) -> np.ndarray:
    ctx = JetContext(tuple(complex(v) for v in z), tuple(complex(v) for v in eta), 2)
    return np.asarray(fundamental_tensor(eval_L_jet(spec, ctx)).g.value)


def fd_connection(spec: MetricSpec, z, eta, h: float = DEFAULT_STEP) -> dict:
    """N^k_j and L^i_{jk} from fourth-order central differences of g in z and eta."""
    z = np.asarray(z, complex)
    eta = np.asarray(eta, complex)
    hz = h * max(1.0, float(np.max(np.abs(z))))
    he = h * max(1.0, float(np.max(np.abs(eta))))
    g = _jet_g(spec, z, eta)
    ginv = np.linalg.inv(g)  # ginv[j, k] = g^{jbar k}, g @ ginv = 1
    dz_g = np.stack([_wirtinger(lambda zz: _jet_g(spec, zz, eta), z, k, hz, fourth=True) for k in range(2)], axis=-1)
    de_g = np.stack([_wirtinger(lambda ee: _jet_g(spec, z, ee), eta, k, he, fourth=True) for k in range(2)], axis=-1)
    N = np.einsum("mk,lmj,l->kj", ginv, dz_g, eta)
    delta_g = dz_g - np.einsum("jls,sk->jlk", de_g, N)
    Lh = np.einsum("li,jlk->ijk", ginv, delta_g)
    return {"g": g, "N": N, "L": Lh}


def _rel(a, b) -> float:
    a, b = np.asarray(a), np.asarray(b)
    return float(np.max(np.abs(a - b))) / max(1.0, float(np.max(np.abs(a))), float(np.max(np.abs(b))))


def fd_check_point(spec: MetricSpec, z, eta, h: float = DEFAULT_STEP, order: int = 6) -> dict:
    """Relative deviation between jet and finite-difference g, N, L at one point."""
    geo = Geometry(spec, z, eta, order, require_definite=False)
    g_fd = fd_fundamental_tensor(spec, z, eta, h)
    conn = fd_connection(spec, z, eta, h)
    return {
        "g": _rel(geo.g.value, g_fd),
        "N": _rel(geo.N.value, conn["N"]),
        "L": _rel(geo.Lh.value, conn["L"]),
    }


def truncation_stability(spec: MetricSpec, z, eta, low: int = 6, high: int = 8) -> dict:
    """Relative change of base-point values between two jet orders."""
    out = {}
    cvs = [Curvature(Frame(Geometry(spec, z, eta, o))) for o in (low, high)]
    fields = {
        "g": lambda c: c.geo.g.value, "N": lambda c: c.geo.N.value, "L": lambda c: c.geo.Lh.value,
        "C": lambda c: c.geo.C.value, "R": lambda c: c.Rl.value, "S": lambda c: c.Sl.value,
        "I": lambda c: c.I.value, "K": lambda c: c.K.value, "W": lambda c: c.W.value,
    }
    for name, get in fields.items():
        out[name] = _rel(get(cvs[0]), get(cvs[1]))
    return out
