"""Local complex Berwald frame {l, m}, its horizontal lift {lambda, mu}, and
the vertical (A, B) and horizontal (J, U, V, X, O, Y, E, H) scalars."""

from __future__ import annotations

from functools import cached_property

import numpy as np

from . import jets
from .errors import DegenerateMetricError
from .geometry import Geometry, rel_residual
from .jets import WJet
from .tolerance import ToleranceConfig, both

_AXES = "ABCDEFGH"


def along(DX: WJet, v: WJet) -> WJet:
    """Contract the trailing (derivative) axis of DX with the vector v."""
    ax = _AXES[: len(DX.shape) - 1]
    return jets.einsum(f"{ax}s,s->{ax}", DX, v)


def outer(*vs: WJet) -> WJet:
    idx = "ijkl"[: len(vs)]
    return jets.einsum(",".join(idx) + "->" + idx, *vs)


def _res(lhs, rhs, *scale) -> float:
    return rel_residual(lhs - rhs, lhs, rhs, *scale)


def _partial_scale(geo, X, v=None, barred=False):
    """Size of the coordinate part of a horizontal derivative, which cancels against N."""
    d = geo.dzb(X) if barred else geo.dz(X)
    return d if v is None else along(d, v)


class Frame:
    """Berwald frame data on top of a :class:`Geometry`."""

    def __init__(self, geo: Geometry):
        self.geo = geo
        det0 = complex(geo.det.value)
        if det0.real <= 0:
            raise DegenerateMetricError(f"det g = {det0!r} is not positive; no Berwald frame")

    # -- vertical frame ------------------------------------------------------

    @cached_property
    def F(self) -> WJet:
        return jets.sqrt(self.geo.L)

    @cached_property
    def sqrt_g(self) -> WJet:
        return jets.sqrt(self.geo.det)

    @cached_property
    def l_up(self) -> WJet:
        return self.geo.eta / self.F

    @cached_property
    def l_dn(self) -> WJet:
        return jets.einsum("ij,j->i", self.geo.g, self.geo.etabar) / self.F

    @cached_property
    def m_up(self) -> WJet:
        return WJet.stack([-self.l_dn[1], self.l_dn[0]]) / self.sqrt_g

    @cached_property
    def m_dn(self) -> WJet:
        return WJet.stack([-self.l_up[1], self.l_up[0]]) * self.sqrt_g

    @cached_property
    def l_upb(self) -> WJet:
        return self.l_up.conj()

    @cached_property
    def l_dnb(self) -> WJet:
        return self.l_dn.conj()

    @cached_property
    def m_upb(self) -> WJet:
        return self.m_up.conj()

    @cached_property
    def m_dnb(self) -> WJet:
        return self.m_dn.conj()

    # -- vertical and horizontal directional derivatives ---------------------

    def l(self, X):
        return along(self.geo.de(X), self.l_up)

    def m(self, X):
        return along(self.geo.de(X), self.m_up)

    def lb(self, X):
        return along(self.geo.deb(X), self.l_upb)

    def mb(self, X):
        return along(self.geo.deb(X), self.m_upb)

    def lam(self, X):
        return along(self.geo.delta(X), self.l_up)

    def mu(self, X):
        return along(self.geo.delta(X), self.m_up)

    def lamb(self, X):
        return along(self.geo.deltabar(X), self.l_upb)

    def mub(self, X):
        return along(self.geo.deltabar(X), self.m_upb)

    # -- scalars -----------------------------------------------------------------

    @cached_property
    def A(self) -> WJet:
        return jets.einsum("j,k,h,hkj->", self.m_up, self.m_up, self.l_dn, self.geo.C)

    @cached_property
    def B(self) -> WJet:
        return jets.einsum("h,k,j,hjk->", self.m_dn, self.m_up, self.m_up, self.geo.C)

    def _hscalar(self, a: WJet, b: WJet, c: WJet) -> WJet:
        return jets.einsum("j,k,i,ijk->", a, b, c, self.geo.Lh)

    @cached_property
    def horizontal(self) -> dict:
        l, m, ld, md = self.l_up, self.m_up, self.l_dn, self.m_dn
        return {
            "J": self._hscalar(l, l, ld), "U": self._hscalar(m, l, ld),
            "V": self._hscalar(l, m, ld), "X": self._hscalar(m, m, ld),
            "O": self._hscalar(l, l, md), "Y": self._hscalar(m, l, md),
            "E": self._hscalar(l, m, md), "H": self._hscalar(m, m, md),
        }

    def __getattr__(self, name):
        # J, U, V, X, O, Y, E, H and their conjugates Jb, Ub, ...
        if len(name) in (1, 2) and name[0] in "JUVXOYEH" and name[1:] in ("", "b"):
            s = self.horizontal[name[0]]
            return s.conj() if name.endswith("b") else s
        raise AttributeError(name)

    @cached_property
    def Ab(self) -> WJet:
        return self.A.conj()

    @cached_property
    def Bb(self) -> WJet:
        return self.B.conj()

    # -- reconstructions --------------------------------------------------------

    def C_from_scalars(self) -> WJet:
        l, m, md = self.l_up, self.m_up, self.m_dn
        return self.A * outer(l, md, md) + self.B * outer(m, md, md)

    def L_from_scalars(self) -> WJet:
        lu, mu_, ld, md = self.l_up, self.m_up, self.l_dn, self.m_dn
        h = self.horizontal
        out = (h["J"] * outer(lu, ld, ld) + h["U"] * outer(lu, md, ld)
               + h["V"] * outer(lu, ld, md) + h["X"] * outer(lu, md, md)
               + h["O"] * outer(mu_, ld, ld) + h["Y"] * outer(mu_, md, ld)
               + h["E"] * outer(mu_, ld, md) + h["H"] * outer(mu_, md, md))
        return out


def build_frame(geo: Geometry) -> Frame:
    return Frame(geo)


def frame_structure_residuals(fr: Frame) -> dict:
    """Defining relations, orthonormality and the decompositions of g, C, L."""
    geo = fr.geo
    g = geo.g
    G = lambda a, b: jets.einsum("ij,i,j->", g, a, b.conj())  # noqa: E731
    one = 1.0
    return {
        "l_up": _res(fr.l_up, geo.eta / fr.F),
        "m_dn_lowered": _res(fr.m_dn, jets.einsum("ij,j->i", g, fr.m_upb)),
        "l_dn_lowered": _res(fr.l_dn, jets.einsum("ij,j->i", g, fr.l_upb)),
        "G(l,l)": _res(G(fr.l_up, fr.l_up), one),
        "G(m,m)": _res(G(fr.m_up, fr.m_up), one),
        "G(l,m)": _res(G(fr.l_up, fr.m_up), 0.0),
        "g_decomposition": _res(g, outer(fr.l_dn, fr.l_dnb) + outer(fr.m_dn, fr.m_dnb)),
        "C_decomposition": _res(geo.C, fr.C_from_scalars()),
        "L_decomposition": _res(geo.Lh, fr.L_from_scalars()),
    }


def vertical_action_residuals(fr: Frame) -> dict:
    """Actions of l, m, lbar, mbar on the frame vectors."""
    F, A, B, Bb = fr.F, fr.A, fr.B, fr.Bb
    li, mi, lu, mu_ = fr.l_dn, fr.m_dn, fr.l_up, fr.m_up
    h = 1 / (2 * F)
    return {
        "l(l_i)": _res(fr.l(li), -h * li),
        "lb(l_i)": _res(fr.lb(li), h * li),
        "l(m_i)": _res(fr.l(mi), h * mi),
        "lb(m_i)": _res(fr.lb(mi), -h * mi),
        "m(l_i)": _res(fr.m(li), A * mi),
        "mb(l_i)": _res(fr.mb(li), mi / F),
        "m(m_i)": _res(fr.m(mi), 0.5 * B * mi - li / F),
        "mb(m_i)": _res(fr.mb(mi), 0.5 * Bb * mi),
        "l(l^i)": _res(fr.l(lu), h * lu),
        "lb(l^i)": _res(fr.lb(lu), -h * lu),
        "l(m^i)": _res(fr.l(mu_), -h * mu_),
        "lb(m^i)": _res(fr.lb(mu_), h * mu_),
        "m(l^i)": _res(fr.m(lu), mu_ / F),
        "mb(l^i)": _res(fr.mb(lu), 0.0 * lu),
        "m(m^i)": _res(fr.m(mu_), -0.5 * B * mu_ - A * lu),
        "mb(m^i)": _res(fr.mb(mu_), -lu / F - 0.5 * Bb * mu_),
    }


def vertical_covariant_residuals(fr: Frame) -> dict:
    """v- and vbar-covariant derivatives of the frame, F|_j, and of A, B."""
    geo = fr.geo
    F, A, B, Bb = fr.F, fr.A, fr.B, fr.Bb
    li, mi, lu, mu_ = fr.l_dn, fr.m_dn, fr.l_up, fr.m_up
    lib, mib = fr.l_dnb, fr.m_dnb
    h = 1 / (2 * F)
    eye = np.eye(2)
    out = {
        # l_s C^s_ij = A m_i m_j cancels the A-term of the plain derivative
        "l_i|j": _res(geo.cov_v(li, "D"), -h * outer(li, li)),
        "d_j l_i": _res(geo.de(li), -h * outer(li, li) + A * outer(mi, mi)),
        "l_i|jb": _res(geo.cov_vbar(li, "D"), h * outer(li, lib) + outer(mi, mib) / F),
        "m_i|j": _res(geo.cov_v(mi, "D"),
                      h * outer(mi, li) - outer(li, mi) / F - 0.5 * B * outer(mi, mi)),
        "m_i|jb": _res(geo.cov_vbar(mi, "D"), -h * outer(mi, lib) + 0.5 * Bb * outer(mi, mib)),
        "l^i|j": _res(geo.cov_v(lu, "U"), (1 / F) * WJet.constant(eye, F.order) - h * outer(lu, li)),
        "l^i|jb": _res(geo.cov_vbar(lu, "U"), -h * outer(lu, lib)),
        "m^i|j": _res(geo.cov_v(mu_, "U"), -h * outer(mu_, li) + 0.5 * B * outer(mu_, mi)),
        "m^i|jb": _res(geo.cov_vbar(mu_, "U"),
                       h * outer(mu_, lib) - outer(lu, mib) / F - 0.5 * Bb * outer(mu_, mib)),
        "F|_j": _res(geo.de(F), 0.5 * li),
        # derivative expansions of A and B along the frame
        "A|hb": _res(geo.deb(A), 3 * A * h * lib + fr.mb(A) * mib),
        "B|hb": _res(geo.deb(B), B * h * lib + fr.mb(B) * mib),
        "A|h": _res(geo.de(A), -5 * A * h * li + fr.m(A) * mi),
        "B|h": _res(geo.de(B), -3 * B * h * li + fr.m(B) * mi),
    }
    return out


def horizontal_action_residuals(fr: Frame) -> dict:
    """The lambda/mu action table, including lambda(g), mu(g), lambda(L), mu(L)."""
    geo = fr.geo
    J, U, V, X, O, Y, E, H = (fr.horizontal[k] for k in "JUVXOYEH")
    Jb, Yb, Vb, Hb = J.conj(), Y.conj(), V.conj(), H.conj()
    li, mi, lu, mu_ = fr.l_dn, fr.m_dn, fr.l_up, fr.m_up
    det = geo.det
    zero = 0.0 * li
    probe = geo.det * geo.L  # an arbitrary non-trivial scalar field
    return {
        "lam(l_i)": _res(fr.lam(li), J * li + U * mi),
        "lamb(l_i)": _res(fr.lamb(li), zero, _partial_scale(geo, li, fr.l_upb, barred=True)),
        "lamb(l^i)": _res(fr.lamb(lu), zero, _partial_scale(geo, lu, fr.l_upb, barred=True)),
        "lam(l^i)": _res(fr.lam(lu), -J * lu - O * mu_),
        "lam(m_i)": _res(fr.lam(mi), O * li - 0.5 * (J - Y) * mi),
        "lamb(m_i)": _res(fr.lamb(mi), 0.5 * (Jb + Yb) * mi),
        "lam(m^i)": _res(fr.lam(mu_), -U * lu + 0.5 * (J - Y) * mu_),
        "lamb(m^i)": _res(fr.lamb(mu_), -0.5 * (Jb + Yb) * mu_),
        "mu(l_i)": _res(fr.mu(li), V * li + X * mi),
        "mub(l_i)": _res(fr.mub(li), zero, _partial_scale(geo, li, fr.m_upb, barred=True)),
        "mub(l^i)": _res(fr.mub(lu), zero, _partial_scale(geo, lu, fr.m_upb, barred=True)),
        "mu(l^i)": _res(fr.mu(lu), -V * lu - E * mu_),
        "mu(m_i)": _res(fr.mu(mi), E * li + 0.5 * (H - V) * mi),
        "mub(m_i)": _res(fr.mub(mi), 0.5 * (Vb + Hb) * mi),
        "mu(m^i)": _res(fr.mu(mu_), -X * lu - 0.5 * (H - V) * mu_),
        "mub(m^i)": _res(fr.mub(mu_), -0.5 * (Vb + Hb) * mu_),
        "lam(g)": _res(fr.lam(det), (J + Y) * det),
        "mu(g)": _res(fr.mu(det), (V + H) * det),
        "lamb(g)": _res(fr.lamb(det), (Jb + Yb) * det),
        "mub(g)": _res(fr.mub(det), (Vb + Hb) * det),
        "delta_i": _res(geo.delta(probe), li * fr.lam(probe) + mi * fr.mu(probe)),
        "lam(L)": _res(fr.lam(geo.L), 0.0, _partial_scale(geo, geo.L, lu)),
        "mu(L)": _res(fr.mu(geo.L), 0.0, _partial_scale(geo, geo.L, mu_)),
    }


def horizontal_covariant_residuals(fr: Frame) -> dict:
    """h- and hbar-covariant derivatives of the frame vectors."""
    geo = fr.geo
    J, V, Y, H = (fr.horizontal[k] for k in "JVYH")
    li, mi, lu, mu_ = fr.l_dn, fr.m_dn, fr.l_up, fr.m_up
    lib, mib = fr.l_dnb, fr.m_dnb
    hol = (J + Y) * li + (V + H) * mi
    ahol = (J + Y).conj() * lib + (V + H).conj() * mib
    zero2 = 0.0 * outer(li, li)
    return {
        "l_i|j": _res(geo.cov_h(li, "D"), zero2, _partial_scale(geo, li)),
        "l_i|jb": _res(geo.cov_hbar(li, "D"), zero2, _partial_scale(geo, li, barred=True)),
        "l^i|j": _res(geo.cov_h(lu, "U"), zero2, _partial_scale(geo, lu)),
        "l^i|jb": _res(geo.cov_hbar(lu, "U"), zero2, _partial_scale(geo, lu, barred=True)),
        "m_i|j": _res(geo.cov_h(mi, "D"), -0.5 * outer(mi, hol)),
        "m_i|jb": _res(geo.cov_hbar(mi, "D"), 0.5 * outer(mi, ahol)),
        "m^i|j": _res(geo.cov_h(mu_, "U"), 0.5 * outer(mu_, hol)),
        "m^i|jb": _res(geo.cov_hbar(mu_, "U"), -0.5 * outer(mu_, ahol)),
    }


def scalar_vertical_derivative_residuals(fr: Frame) -> dict:
    """Vertical derivatives of J, V, O, E in terms of the frame."""
    geo = fr.geo
    F, A, B = fr.F, fr.A, fr.B
    J, U, V, X, O, Y, E, H = (fr.horizontal[k] for k in "JUVXOYEH")
    li, mi = fr.l_dn, fr.m_dn
    h = 1 / (2 * F)
    return {
        "J|k": _res(geo.de(J), h * J * li + ((U + V) / F + A * O) * mi),
        "V|k": _res(geo.de(V), -h * V * li + (A * (E - J) - 0.5 * B * V + X / F) * mi),
        "O|k": _res(geo.de(O), 3 * h * O * li + ((E + Y - J) / F + 0.5 * B * O) * mi),
        "E|k": _res(geo.de(E), h * E * li + ((H - V) / F - A * O) * mi),
    }


def frame_identity_residuals(fr: Frame) -> dict:
    """All frame identity families, flattened as ``family/item``."""
    out = {}
    for fam, fn in (("structure", frame_structure_residuals),
                    ("vertical_action", vertical_action_residuals),
                    ("vertical_covariant", vertical_covariant_residuals),
                    ("horizontal_action", horizontal_action_residuals),
                    ("horizontal_covariant", horizontal_covariant_residuals),
                    ("scalar_vertical_derivatives", scalar_vertical_derivative_residuals)):
        for k, v in fn(fr).items():
            out[f"{fam}/{k}"] = v
    return out


def kahler_scalar_test(fr: Frame, tol: ToleranceConfig | None = None) -> dict:
    """Kaehler (U=V, Y=E) and weakly Kaehler (U=V) from the frame scalars,
    cross-checked against the torsion contractions."""
    tol = tol or ToleranceConfig()
    h = fr.horizontal
    U, V, Y, E = (complex(h[k].value) for k in "UVYE")
    scale = max(1.0, abs(U), abs(V), abs(Y), abs(E))
    uv = abs(U - V) / scale
    ye = abs(Y - E) / scale
    geo = fr.geo
    t_eta = rel_residual(geo.T_eta, geo.Lh)
    t_scalar = rel_residual(geo.T_scalar, geo.Lh) / max(1.0, abs(complex(geo.L.value)))
    weak = tol.verdict(uv, "weakly_kahler")
    kahler = both(weak, tol.verdict(ye, "kahler"))
    return {
        "weakly_kahler": {"verdict": weak, "residual": uv,
                          "torsion_verdict": tol.verdict(t_scalar, "weakly_kahler"),
                          "torsion_residual": t_scalar},
        "kahler": {"verdict": kahler, "residual": max(uv, ye),
                   "torsion_verdict": tol.verdict(t_eta, "kahler"), "torsion_residual": t_eta},
    }
