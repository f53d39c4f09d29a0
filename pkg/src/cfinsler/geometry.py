"""Fundamental tensor, Chern-Finsler connection, spray and derived connections.

Array conventions (every entry is a jet, tensor axes first):

* ``g[i, j]``     = g_{i jbar} = d^2 L / d eta^i d etabar^j
* ``ginv[j, k]``  = g^{jbar k}, so that ``g @ ginv = 1``
* ``N[k, j]``     = N^k_j
* ``L[i, j, k]``  = L^i_{jk},  ``C[i, j, k]`` = C^i_{jk}
* derivative operators append the differentiation index as a trailing axis.

Index signatures for covariant derivatives use one character per tensor
axis: ``U`` unbarred upper, ``D`` unbarred lower, ``u`` barred upper,
``d`` barred lower.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import jets
from .errors import DegenerateMetricError, OrderBudgetError
from .jets import ETA, ETABAR, Z, ZBAR, JetContext, WJet
from .metrics import MetricSpec, eval_L_jet

DEGENERACY_TOL = 1e-12
_AXES = "ABCDEFGH"


def _append_contract(X: WJet, M: WJet, what: str) -> WJet:
    """sum_s M[s, k] * X[..., s] -> [..., k] (trailing-axis contraction)."""
    ax = _AXES[: len(X.shape) - 1]
    return jets.einsum(f"{ax}s,sk->{ax}k", X, M)


def _axis_term(X: WJet, axis: int, conn: WJet, up: bool) -> WJet:
    """Connection term acting on one tensor axis of X with derivative index k.

    Upper index i:  sum_l conn[i, l, k] X[.. l ..]
    Lower index j: -sum_l conn[l, j, k] X[.. l ..]
    """
    n = len(X.shape)
    xs = list(_AXES[:n])
    xs[axis] = "s"
    out = list(_AXES[:n])
    out[axis] = "t"
    cs = "tsk" if up else "stk"
    term = jets.einsum(f"{''.join(xs)},{cs}->{''.join(out)}k", X, conn)
    return term if up else -term


@dataclass(frozen=True)
class FundamentalTensor:
    g: WJet
    ginv: WJet
    det: WJet
    hermitian_defect: float
    positive_definite: bool


def fundamental_tensor(Ljet: WJet) -> FundamentalTensor:
    if Ljet.order < 2:
        raise OrderBudgetError("order budget exceeded: the fundamental tensor needs order >= 2")
    g = Ljet.grad(ETA, "g").grad(ETABAR, "g")
    g0 = np.asarray(g.value)
    scale = max(1.0, float(np.max(np.abs(g0))))
    det0 = g0[0, 0] * g0[1, 1] - g0[0, 1] * g0[1, 0]
    trace = abs(g0[0, 0]) + abs(g0[1, 1])
    if abs(det0) <= DEGENERACY_TOL * max(trace, 1e-300) ** 2:
        raise DegenerateMetricError(f"det g = {det0!r} is numerically zero")
    ginv, det = jets.inv2(g)
    herm = float(np.max(np.abs(g0 - g0.conj().T))) / scale
    pd = bool(g0[0, 0].real > 0 and det0.real > 0)
    return FundamentalTensor(g, ginv, det, herm, pd)


class Geometry:
    """All connection data of a metric at one base point, computed lazily."""

    def __init__(self, spec: MetricSpec, z, eta, order: int = 6, require_definite: bool = True):
        self.spec = spec
        self.ctx = JetContext(tuple(complex(v) for v in z), tuple(complex(v) for v in eta), order)
        self.L = eval_L_jet(spec, self.ctx)
        self.ft = fundamental_tensor(self.L)
        if require_definite and not self.ft.positive_definite:
            raise DegenerateMetricError(
                f"fundamental tensor is not positive definite (g11={self.ft.g.value[0, 0]!r}, "
                f"det={self.ft.det.value!r})")
        v = jets.seed(self.ctx)
        self.eta = WJet.stack(v[2:4])
        self.etabar = WJet.stack(v[6:8])

    @property
    def z(self):
        return self.ctx.z

    @property
    def g(self) -> WJet:
        return self.ft.g

    @property
    def ginv(self) -> WJet:
        return self.ft.ginv

    @property
    def det(self) -> WJet:
        return self.ft.det

    # -- elementary derivatives (trailing axis = derivative index) --------

    @staticmethod
    def dz(X: WJet, what="field") -> WJet:
        return X.grad(Z, what)

    @staticmethod
    def dzb(X: WJet, what="field") -> WJet:
        return X.grad(ZBAR, what)

    @staticmethod
    def de(X: WJet, what="field") -> WJet:
        return X.grad(ETA, what)

    @staticmethod
    def deb(X: WJet, what="field") -> WJet:
        return X.grad(ETABAR, what)

    # -- Chern-Finsler connection -----------------------------------------

    @cached_property
    def N(self) -> WJet:
        return jets.einsum("mk,lmj,l->kj", self.ginv, self.dz(self.g, "N"), self.eta)

    @cached_property
    def Nbar(self) -> WJet:
        return self.N.conj()

    def delta(self, X: WJet, what="field") -> WJet:
        """delta_k X = d_{z^k} X - N^s_k d_{eta^s} X."""
        return self.dz(X, what) - _append_contract(self.de(X, what), self.N, what)

    def deltabar(self, X: WJet, what="field") -> WJet:
        return self.dzb(X, what) - _append_contract(self.deb(X, what), self.Nbar, what)

    @cached_property
    def Lh(self) -> WJet:
        return jets.einsum("li,jlk->ijk", self.ginv, self.delta(self.g, "L"))

    @cached_property
    def C(self) -> WJet:
        return jets.einsum("li,jlk->ijk", self.ginv, self.de(self.g, "C"))

    @cached_property
    def Lbar(self) -> WJet:
        return self.Lh.conj()

    @cached_property
    def Cbar(self) -> WJet:
        return self.C.conj()

    # -- covariant derivatives ---------------------------------------------

    def _covariant(self, X: WJet, sig: str, base: WJet, conn: WJet, barred: bool) -> WJet:
        if len(sig) != len(X.shape):
            raise ValueError(f"signature {sig!r} does not match tensor rank {len(X.shape)}")
        out = base
        for axis, kind in enumerate(sig):
            if kind not in "UDud":
                raise ValueError(f"unknown index kind {kind!r} in signature {sig!r}")
            if (kind in "ud") != barred:
                continue
            out = out + _axis_term(X.truncate(min(X.order, conn.order)), axis, conn, kind in "Uu")
        return out

    def cov_h(self, X: WJet, sig: str = "") -> WJet:
        """h-covariant derivative X_{|k}."""
        return self._covariant(X, sig, self.delta(X), self.Lh, False)

    def cov_hbar(self, X: WJet, sig: str = "") -> WJet:
        """hbar-covariant derivative X_{|kbar}."""
        return self._covariant(X, sig, self.deltabar(X), self.Lbar, True)

    def cov_v(self, X: WJet, sig: str = "") -> WJet:
        """v-covariant derivative X|_k."""
        return self._covariant(X, sig, self.de(X), self.C, False)

    def cov_vbar(self, X: WJet, sig: str = "") -> WJet:
        """vbar-covariant derivative X|_kbar."""
        return self._covariant(X, sig, self.deb(X), self.Cbar, True)

    # -- torsion ------------------------------------------------------------

    @cached_property
    def T(self) -> WJet:
        return self.Lh - self.Lh.transpose(0, 2, 1)

    @cached_property
    def T_eta(self) -> WJet:
        """T^i_{jk} eta^j, indexed [i, k]."""
        return jets.einsum("ijk,j->ik", self.T, self.eta)

    @cached_property
    def T_scalar(self) -> WJet:
        """g_{i lbar} T^i_{jk} eta^j etabar^l, indexed [k]."""
        return jets.einsum("il,ik,l->k", self.g, self.T_eta, self.etabar)

    # -- spray and derived connections ------------------------------------

    @cached_property
    def G(self) -> WJet:
        return 0.5 * jets.einsum("ij,j->i", self.N, self.eta)

    @cached_property
    def Nc(self) -> WJet:
        """Canonical nonlinear connection d_{eta^j} G^i, indexed [i, j]."""
        return self.de(self.G, "canonical connection")

    @cached_property
    def dG_bar(self) -> WJet:
        """d_{etabar^k} G^i, indexed [i, k]."""
        return self.deb(self.G, "spray")

    @cached_property
    def BL(self) -> WJet:
        return self.de(self.Nc, "Berwald connection")

    @cached_property
    def BLbar(self) -> WJet:
        return self.deb(self.Nc, "Berwald connection")

    def delta_c(self, X: WJet, what="field") -> WJet:
        return self.dz(X, what) - _append_contract(self.de(X, what), self.Nc, what)

    def deltabar_c(self, X: WJet, what="field") -> WJet:
        return self.dzb(X, what) - _append_contract(self.deb(X, what), self.Nc.conj(), what)

    @cached_property
    def RL(self) -> WJet:
        dg = self.delta_c(self.g, "Rund connection")
        return 0.5 * (jets.einsum("li,jlk->ijk", self.ginv, dg)
                      + jets.einsum("li,klj->ijk", self.ginv, dg))

    @cached_property
    def RLbar(self) -> WJet:
        # transcribed literally; see the ledger note on its index pattern
        dg = self.deltabar_c(self.g, "Rund connection")
        return 0.5 * jets.einsum("li,jlk->ijk", self.ginv, dg - dg.transpose(0, 2, 1))


def geometry(spec: MetricSpec, z, eta, order: int = 6, **kw) -> Geometry:
    return Geometry(spec, z, eta, order, **kw)


def max_abs(x) -> float:
    if isinstance(x, WJet):
        x = x.value
    return float(np.max(np.abs(np.asarray(x)))) if np.size(x) else 0.0


def rel_residual(diff, *refs) -> float:
    """max|diff| / max(1, largest |component| among the references)."""
    scale = max([1.0] + [max_abs(r) for r in refs])
    return max_abs(diff) / scale


def metric_compatibility_residuals(geo: Geometry) -> dict:
    """g_{i jbar} is parallel for all four covariant derivatives."""
    g = geo.g
    return {
        "h": rel_residual(geo.cov_h(g, "Dd"), geo.delta(g)),
        "hbar": rel_residual(geo.cov_hbar(g, "Dd"), geo.deltabar(g)),
        "v": rel_residual(geo.cov_v(g, "Dd"), geo.de(g)),
        "vbar": rel_residual(geo.cov_vbar(g, "Dd"), geo.deb(g)),
    }
