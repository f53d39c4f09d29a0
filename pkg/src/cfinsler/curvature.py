"""Curvature blocks R, P, Xi, S of the Chern-Finsler connection, the
invariants I, K, W, sectional curvatures, and curvature identity suites.

Curvature arrays are indexed ``X[i, j, h, k]`` for X^i_{j hbar k}; lowered
forms ``Xl[r, j, h, k]`` = g_{i rbar} X^i_{j hbar k}.
"""

from __future__ import annotations

from functools import cached_property

import numpy as np

from . import jets
from .frame import Frame, along, outer
from .geometry import Geometry, max_abs, rel_residual
from .jets import WJet


def _res(lhs, rhs, *scale) -> float:
    return rel_residual(lhs - rhs, lhs, rhs, *scale)


def _contract4(Xl: WJet, v: WJet) -> WJet:
    """X(v, vbar, v, vbar) = Xl[r, j, h, k] vbar^r v^j vbar^h v^k."""
    vb = v.conj()
    return jets.einsum("rjhk,r,j,h,k->", Xl, vb, v, vb, v)


class Curvature:
    """Curvature tensors and invariants over a :class:`Frame`."""

    def __init__(self, frame: Frame):
        self.frame = frame
        self.geo: Geometry = frame.geo

    def _lower(self, X: WJet) -> WJet:
        return jets.einsum("ir,ijhk->rjhk", self.geo.g, X)

    # -- blocks ------------------------------------------------------------------

    @cached_property
    def dbarN(self) -> WJet:
        """delta_hbar N^l_k, indexed [l, k, h]."""
        return self.geo.deltabar(self.geo.N, "curvature")

    @cached_property
    def debN(self) -> WJet:
        """d_{etabar^h} N^l_k, indexed [l, k, h]."""
        return self.geo.deb(self.geo.N, "curvature")

    @cached_property
    def R(self) -> WJet:
        geo = self.geo
        return (-geo.deltabar(geo.Lh, "R").transpose(0, 1, 3, 2)
                - jets.einsum("lkh,ijl->ijhk", self.dbarN, geo.C))

    @cached_property
    def P(self) -> WJet:
        geo = self.geo
        return (-geo.deb(geo.Lh, "P").transpose(0, 1, 3, 2)
                - jets.einsum("lkh,ijl->ijhk", self.debN, geo.C))

    @cached_property
    def Xi(self) -> WJet:
        return -self.geo.deltabar(self.geo.C, "Xi").transpose(0, 1, 3, 2)

    @cached_property
    def S(self) -> WJet:
        return -self.geo.deb(self.geo.C, "S").transpose(0, 1, 3, 2)

    @cached_property
    def Rl(self) -> WJet:
        return self._lower(self.R)

    @cached_property
    def Pl(self) -> WJet:
        return self._lower(self.P)

    @cached_property
    def Xil(self) -> WJet:
        return self._lower(self.Xi)

    @cached_property
    def Sl(self) -> WJet:
        return self._lower(self.S)

    @cached_property
    def R0(self) -> WJet:
        """R^i_{0 hbar k}, indexed [i, h, k]."""
        return jets.einsum("ijhk,j->ihk", self.R, self.geo.eta)

    @cached_property
    def P0(self) -> WJet:
        """P^i_{0 hbar k}, indexed [i, h, k]."""
        return jets.einsum("ijhk,j->ihk", self.P, self.geo.eta)

    @cached_property
    def C_low(self) -> WJet:
        """C_{j rbar k} = C^i_{jk} g_{i rbar}, indexed [j, r, k]."""
        return jets.einsum("ijk,ir->jrk", self.geo.C, self.geo.g)

    @cached_property
    def Cbar_low(self) -> WJet:
        """C_{l rbar hbar} = d_{etabar^h} g_{l rbar}, indexed [l, r, h]."""
        return self.geo.deb(self.geo.g, "C")

    # -- invariants ------------------------------------------------------------

    @cached_property
    def I(self) -> WJet:  # noqa: E743
        fr = self.frame
        return -fr.mb(fr.B) - 0.5 * fr.B * fr.Bb

    @cached_property
    def K(self) -> WJet:
        fr = self.frame
        J = fr.horizontal["J"]
        return -along(self.geo.deltabar(J, "K"), self.geo.etabar) / fr.F

    @cached_property
    def W(self) -> WJet:
        fr = self.frame
        h = fr.horizontal
        H, E, V = h["H"], h["E"], h["V"]
        return (-fr.mub(H) - 0.5 * H * (V.conj() + H.conj())
                - fr.B * fr.F * fr.mub(E))

    def invariants(self) -> dict:
        return {"I": complex(self.I.value), "K": complex(self.K.value), "W": complex(self.W.value)}

    def sectional_curvatures(self) -> dict:
        """Each curvature by contraction of the Riemann-type tensor and by its invariant."""
        fr = self.frame
        contraction = {
            "Kv_l": 2 * _contract4(self.Sl, fr.l_up).value,
            "Kv_m": 2 * _contract4(self.Sl, fr.m_up).value,
            "Kh_lambda": 2 * _contract4(self.Rl, fr.l_up).value,
            "Kh_mu": 2 * _contract4(self.Rl, fr.m_up).value,
        }
        inv = self.invariants()
        formula = {"Kv_l": 0.0, "Kv_m": 2 * inv["I"], "Kh_lambda": 2 * inv["K"], "Kh_mu": 2 * inv["W"]}
        out = {}
        for k in contraction:
            a, b = complex(contraction[k]), complex(formula[k])
            out[k] = {"contraction": a, "invariant": b,
                      "disagreement": abs(a - b) / max(1.0, abs(a), abs(b))}
        return out

    # -- Riemann-type structure ------------------------------------------------

    def symmetry_residuals(self) -> dict:
        """Conjugation symmetries of the lowered blocks at the base point."""
        Rl, Pl, Xil, Sl = (np.asarray(x.value) for x in (self.Rl, self.Pl, self.Xil, self.Sl))
        sw = (1, 0, 3, 2)
        geo = self.geo
        # Xi and P are differences of much larger coordinate and fibre partials
        pieces = (self._lower(geo.dzb(geo.C)), self._lower(geo.deb(geo.Lh)))
        return {
            "R": _res(np.conj(Rl), Rl.transpose(sw)),
            "Xi_P": _res(np.conj(Xil), Pl.transpose(sw), *pieces),
            "P_Xi": _res(np.conj(Pl), Xil.transpose(sw), *pieces),
            "S": _res(np.conj(Sl), Sl.transpose(sw)),
            "S_jh": _res(Sl.transpose(sw), Sl.transpose(3, 0, 1, 2)),
            "Xi_jk": _res(self.Xi.value, np.asarray(self.Xi.value).transpose(0, 3, 2, 1)),
            "S_jk": _res(self.S.value, np.asarray(self.S.value).transpose(0, 3, 2, 1)),
        }

    def S_structure_residuals(self) -> dict:
        fr = self.frame
        mb = fr.m_dnb
        rank1 = self.I * jets.einsum("r,j,h,k->rjhk", mb, fr.m_dn, mb, fr.m_dn)
        return {
            "S=I mmmm": _res(self.Sl, rank1),
            "A|sb m^sb": _res(fr.mb(fr.A), -fr.A * fr.Bb + fr.B / fr.F),
            "I real": abs(complex(self.I.value).imag) / (1 + abs(complex(self.I.value))),
        }

    def vertical_invariant_homogeneity_residual(self) -> float:
        Id = along(self.geo.de(self.I, "I|_0"), self.geo.eta)
        return _res(Id, -self.I)

    # -- identity suites ----------------------------------------------------------

    def connection_curvature_residuals(self) -> dict:
        geo, fr = self.geo, self.frame
        eta = geo.eta
        out = {}
        # i)
        out["i"] = _res(self.R0, -self.dbarN.transpose(0, 2, 1))
        out["i_lowered"] = _res(jets.einsum("ir,ihk->rhk", geo.g, self.R0),
                                -jets.einsum("ir,ikh->rhk", geo.g, self.dbarN))
        # ii) P relations
        C0 = jets.einsum("lrh,l->rh", self.Cbar_low, eta)
        C0k = geo.cov_h(C0, "dd")  # [r, h, k]
        P0_from_C = -jets.einsum("mi,mhk->ihk", geo.ginv, C0k)
        # horizontal derivatives cancel against their coordinate partials; scale by those
        dC0 = geo.dz(C0)
        out["ii"] = _res(self.P0, P0_from_C, jets.einsum("mi,mhk->ihk", geo.ginv, dC0))
        out["ii_lowered"] = _res(jets.einsum("ir,ihk->rhk", geo.g, self.P0), -C0k, dC0)
        out["ii_P0=-dbN"] = _res(self.P0, -self.debN.transpose(0, 2, 1))
        out["ii_P00"] = _res(jets.einsum("ihk,h->ik", self.P0, geo.etabar), 0.0)
        # iii)
        out["iii_Xi"] = _res(self.Xi, -geo.cov_hbar(geo.C, "UDD").transpose(0, 1, 3, 2), geo.dzb(geo.C))
        out["iii_S"] = _res(self.S, -geo.cov_vbar(geo.C, "UDD").transpose(0, 1, 3, 2))
        zero = 0.0
        out["iii_Xi0k"] = _res(jets.einsum("ijhk,j->ihk", self.Xi, eta), zero)
        out["iii_Xik0"] = _res(jets.einsum("ijhk,k->ijh", self.Xi, eta), zero)
        out["iii_S0k"] = _res(jets.einsum("ijhk,j->ihk", self.S, eta), zero)
        out["iii_Sk0"] = _res(jets.einsum("ijhk,k->ijh", self.S, eta), zero)
        # lowered: Xi_{rbar j hbar k} = -C_{j rbar k | hbar}, S likewise with |_hbar
        out["iii_Xi_lowered"] = _res(self.Xil, -geo.cov_hbar(self.C_low, "DdD").transpose(1, 0, 3, 2),
                                     geo.dzb(self.C_low))
        out["iii_S_lowered"] = _res(self.Sl, -geo.cov_vbar(self.C_low, "DdD").transpose(1, 0, 3, 2))
        # iv)
        lhs = geo.cov_h(self.Cbar_low, "Ddd")  # [l, r, h, k]
        rhs = (jets.einsum("ilkh,ir->lrhk", geo.deb(geo.Lh), geo.g)
               + jets.einsum("ikh,irl->lrhk", self.debN, self.C_low))
        out["iv"] = _res(lhs, rhs, geo.dz(self.Cbar_low))
        # v)
        lhs = geo.cov_h(self.C_low, "DdD")  # [l, r, h, k]
        rhs = jets.einsum("ilkh,ir->lrhk", geo.de(geo.Lh), geo.g)
        out["v"] = _res(lhs, rhs, geo.dz(self.C_low))
        # vi)
        P0j = geo.cov_v(self.P0, "UdD")  # [i, h, k, j]
        lhs = self.P - P0j.transpose(0, 3, 1, 2) - jets.einsum("ihr,rkj->ijhk", self.P0, geo.C)
        out["vi"] = _res(lhs, 0.0 * lhs) / max(1.0, max_abs(self.P), max_abs(P0j))
        return out

    def ricci_identity_residuals(self) -> dict:
        """Ricci identities for X in {conj A, conj B, F}."""
        geo, fr = self.geo, self.frame
        out = {}
        for name, X in (("Abar", fr.Ab), ("Bbar", fr.Bb), ("F", fr.F)):
            dvX = geo.de(X)
            dhX = geo.delta(X)
            lhs = geo.cov_h(dvX, "D") - geo.cov_v(dhX, "D").transpose(1, 0)  # [k, j]
            rhs = jets.einsum("ijk,i->kj", geo.C, dhX)
            out[f"i_{name}"] = _res(lhs, rhs)
            lhs = geo.cov_h(geo.deb(X), "d") - geo.cov_vbar(dhX, "D").transpose(1, 0)
            rhs = -jets.einsum("ikj,i->kj", self.P0, dvX)
            out[f"ii_{name}"] = _res(lhs, rhs)
        return out

    def bianchi_residuals(self) -> dict:
        geo = self.geo
        sig = "dDdD"
        Cb = geo.Cbar
        # Xi|_sbar - S_|hbar + Xi Cbar
        t1 = geo.cov_vbar(self.Xil, sig)  # [r, j, h, k, s]
        t2 = geo.cov_hbar(self.Sl, sig).transpose(0, 1, 4, 3, 2)  # [r, j, s, k, h] -> [r, j, h, k, s]
        t3 = jets.einsum("rjpk,psh->rjhks", self.Xil, Cb)
        b1 = t1 - t2 + t3
        out = {"Xi_S": rel_residual(b1, t1, t2, t3, geo.dzb(self.Sl))}
        # mixed identity with free l
        Pb0 = self.P0.conj()  # P^{sbar}_{0bar lbar?}: [s, l, h]
        Rb0 = self.R0.conj()  # [s, k, h]
        u1 = geo.cov_v(self.Rl, sig)  # [r, j, h, k, l]
        u2 = geo.cov_h(self.Xil, sig).transpose(0, 1, 2, 4, 3)  # Xi_{..h l|k} -> [r, j, h, k, l]
        u3 = jets.einsum("rjsk,slh->rjhkl", self.Pl, Pb0)
        u4 = jets.einsum("rjsl,skh->rjhkl", self.Sl, Rb0)
        u5 = jets.einsum("rjhn,nkl->rjhkl", self.Rl, geo.C)
        b2 = u1 - u2 - u3 + u4 + u5
        out["R_Xi_P_S"] = rel_residual(b2, u1, u2, u3, u4, u5, geo.dz(self.Xil))
        # antisymmetrised horizontal identity with torsion
        w1 = geo.cov_h(self.Rl, sig)  # R_{..h k|l}
        w2 = jets.einsum("rjsk,slh->rjhkl", self.Pl, Rb0)
        inner = w1 - w2
        w3 = jets.einsum("rjhn,nkl->rjhkl", self.Rl, geo.T)
        b3 = inner - inner.transpose(0, 1, 2, 4, 3) + w3
        out["R_P_T"] = rel_residual(b3, w1, w2, w3, geo.dz(self.Rl))
        sv = geo.cov_v(self.Sl, sig)
        out["S_vertical"] = _res(sv, sv.transpose(0, 1, 2, 4, 3))
        return out

    def conjugate_frame_derivative_residuals(self) -> dict:
        fr, geo = self.frame, self.geo
        F, A, B, Ab, Bb = fr.F, fr.A, fr.B, fr.Ab, fr.Bb
        J, U, V, X, O, Y, E, H = (fr.horizontal[k] for k in "JUVXOYEH")
        lib, mib = fr.l_dnb, fr.m_dnb
        h = 1 / (2 * F)
        Ab0 = F * fr.lam(Ab)
        Bb0 = F * fr.lam(Bb)
        mO = fr.mb(O) - 0.5 * Bb * O
        mE = fr.mb(E) + O / F
        return {
            "i_J": _res(geo.deb(J), -h * J * lib + (O / F) * mib),
            "i_V": _res(geo.deb(V), h * V * lib + ((E - J) / F - 0.5 * Bb * V) * mib),
            "ii_U": _res(fr.lb(U) - h * U, 0.0),
            # l(X) + lb(X) = 0 for a 0-homogeneous X fixes the coefficient at 3/(2F)
            "ii_X": _res(fr.lb(X) - 3 * h * X, 0.0),
            "ii_O": _res(fr.lb(O) + 3 * h * O, 0.0),
            "ii_Y": _res(fr.lb(Y) + h * Y, 0.0),
            "ii_E": _res(fr.lb(E) + h * E, 0.0),
            "ii_H": _res(fr.lb(H) - h * H, 0.0),
            "iii": _res(fr.mb(U) - (Y - J) / F + 0.5 * Bb * U + F * A * mO, 0.0),
            "iv": _res(fr.mb(V) - (E - J) / F + 0.5 * Bb * V, 0.0),
            "v": _res(fr.mb(X) - (H - U - V) / F + Bb * X + F * A * mE, 0.0),
            "vi": _res(Ab0 / F + Ab * (J + Y), mO),
            "vii": _res(Bb0 / F + 0.5 * Bb * (J + Y), fr.mb(Y) + O / F + F * B * mO),
            "viii": _res(fr.mu(Ab) + Ab * (V + H), mE),
            "ix": _res(fr.mu(Bb) + 0.5 * Bb * (V + H),
                       fr.mb(H) + (Y + E) / F + 0.5 * Bb * H + F * B * mE),
        }

    def rejected_variants(self) -> dict:
        """Alternative forms that do not hold; reported, never gated.

        ``lb(X) = X/(2F)`` and ``P0 = +g^{-1} C0_{|k}`` fail wherever X or P0
        is nonzero; the swapped E coefficients of the hh-bar reconstruction fail
        wherever E_{|0bar} is nonzero.
        """
        fr, geo = self.frame, self.geo
        X = fr.horizontal["X"]
        C0 = jets.einsum("lrh,l->rh", self.Cbar_low, geo.eta)
        P0_from_C = jets.einsum("mi,mhk->ihk", geo.ginv, geo.cov_h(C0, "dd"))
        coeffs = self.hh_coefficients()
        comps = self.hh_frame_components()
        swapped = max(abs(complex(comps[a].value) - complex(coeffs[b].value))
                      for a, b in (("mllm", "lmml"), ("lmml", "mllm")))
        return {"lbX_half": _res(fr.lb(X) - X / (2 * fr.F), 0.0),
                "P0_plus_sign": _res(self.P0, P0_from_C),
                "hh_E_swapped": swapped / max(1.0, max_abs(self.Rl))}

    def frame_derivative_residuals(self) -> dict:
        fr = self.frame
        F, A, B = fr.F, fr.A, fr.B
        J, U, V, X, O, Y, E, H = (fr.horizontal[k] for k in "JUVXOYEH")
        h = 1 / (2 * F)
        A0 = F * fr.lam(A)
        B0 = F * fr.lam(B)
        return {
            "i_U": _res(fr.l(U) + h * U, 0.0),
            "i_X": _res(fr.l(X) + 3 * h * X, 0.0),
            "i_Y": _res(fr.l(Y) - h * Y, 0.0),
            "i_H": _res(fr.l(H) + h * H, 0.0),
            "ii": _res(fr.m(U) - A * (Y - J) + 0.5 * B * U - X / F, A0 / F - A * (J + Y)),
            "iii": _res(fr.m(Y) + A * O - (H - U) / F, B0 / F - 0.5 * B * (J + Y)),
            "iv": _res(fr.m(X) + A * (U + V - H) + B * X, fr.mu(A) - A * (V + H)),
            "v": _res(fr.m(H) + A * (Y + E) + X / F + 0.5 * B * H, fr.mu(B) - 0.5 * B * (V + H)),
        }

    def antiholomorphic_spray(self) -> dict:
        """Antiholomorphic part of the spray against its frame expression."""
        fr, geo = self.frame, self.geo
        F, Ab, Bb = fr.F, fr.Ab, fr.Bb
        J, O, Y = (fr.horizontal[k] for k in "JOY")
        coeff = F * fr.lam(Ab) + F * Ab * (J + Y)
        basis = outer(fr.m_up, fr.m_dnb)
        return {
            "dG_bar": _res(geo.dG_bar, 0.5 * F * coeff * basis),
            "dG_bar_via_O": _res(geo.dG_bar, 0.5 * F * F * (fr.mb(O) - 0.5 * Bb * O) * basis),
            "spray_residual": rel_residual(geo.dG_bar, geo.G) ,
            "frame_residual": abs(complex(coeff.value)) / max(1.0, abs(complex(F.value * Ab.value))),
        }

    def _d0_parts(self, X: WJet) -> float:
        """Magnitudes of the two pieces of X_{|0} = F l^k (d_k X - N^s_k dv_s X)."""
        fr, geo = self.frame, self.geo
        a = fr.F * along(geo.dz(X), fr.l_up)
        b = fr.F * along(jets.einsum("sk,s->k", geo.N, geo.de(X)), fr.l_up)
        return max(abs(complex(a.value)), abs(complex(b.value)))

    def landsberg(self) -> dict:
        """Scalar Landsberg criterion plus frame reconstructions of both connections."""
        fr, geo = self.frame, self.geo
        F, A, B = fr.F, fr.A, fr.B
        J, U, V, X, O, Y, E, H = (fr.horizontal[k] for k in "JUVXOYEH")
        A0 = F * fr.lam(A)
        B0 = F * fr.lam(B)
        cond_a = F * A * (E - Y) - (A0 - F * A * (J + Y))
        cond_b = F * B * (E - Y) - (B0 - 0.5 * F * B * (J + Y))
        terms = [F * A * E, F * A * Y, F * A * J, F * B * E, F * B * Y, F * B * J, A0, B0]
        scale = max(1.0, self._d0_parts(A), self._d0_parts(B),
                    *(abs(complex(x.value)) for x in terms))
        lu, mu_, ld, md = fr.l_up, fr.m_up, fr.l_dn, fr.m_dn
        common = (J * outer(lu, ld, ld) + 0.5 * (U + V) * (outer(lu, md, ld) + outer(lu, ld, md))
                  + O * outer(mu_, ld, ld) + 0.5 * (Y + E) * (outer(mu_, md, ld) + outer(mu_, ld, md)))
        rund = common + (X - 0.5 * F * A * (Y - E)) * outer(lu, md, md) \
            + (H - 0.5 * F * B * (Y - E)) * outer(mu_, md, md)
        berwald = common + (X + 0.5 * (A0 - F * A * (J + Y))) * outer(lu, md, md) \
            + (H + 0.5 * (B0 - 0.5 * F * B * (J + Y))) * outer(mu_, md, md)
        return {
            "criterion": max(abs(complex(cond_a.value)), abs(complex(cond_b.value))) / scale,
            "BL-RL": rel_residual(geo.BL - geo.RL, geo.BL, geo.RL),
            "rund_frame": _res(geo.RL, rund),
            "berwald_frame": _res(geo.BL, berwald),
        }

    def weak_symmetry(self) -> float:
        g = self.geo
        a = jets.einsum("rjhk,r,h,k->j", self.Rl, g.etabar, g.etabar, g.eta)
        b = jets.einsum("rjhk,r,j,h->k", self.Rl, g.etabar, g.eta, g.etabar)
        return _res(a, b)

    @cached_property
    def Q(self) -> WJet:
        """g_{j rbar} g_{k hbar} + g_{k rbar} g_{j hbar}, indexed [r, j, h, k]."""
        g = self.geo.g
        return jets.einsum("jr,kh->rjhk", g, g) + jets.einsum("kr,jh->rjhk", g, g)

    def special_form(self) -> dict:
        """Least-squares fit R ~ Kfit * Q; also the comparison with (K/2) Q."""
        Q, Rl = self.Q, self.Rl
        Qc = Q.conj()
        kfit = jets.einsum("rjhk,rjhk->", Qc, Rl) / jets.einsum("rjhk,rjhk->", Qc, Q)
        K = self.K
        return {
            "Kfit": complex(kfit.value),
            "fit_residual": _res(Rl, kfit * Q),
            "Kfit_vertical_derivative": max_abs(self.geo.de(kfit)) / max(1.0, abs(complex(kfit.value))),
            "R=(K/2)Q": _res(Rl, 0.5 * K * Q),
        }

    def hh_frame_components(self) -> dict:
        """Frame components of R_{rbar j hbar k} for every (l, m) combination."""
        fr = self.frame
        vec = {"l": fr.l_up, "m": fr.m_up}
        out = {}
        for a in "lm":
            for b in "lm":
                for c in "lm":
                    for d in "lm":
                        out[a + b + c + d] = jets.einsum(
                            "rjhk,r,j,h,k->", self.Rl, vec[a].conj(), vec[b], vec[c].conj(), vec[d])
        return out

    def hh_coefficients(self) -> dict:
        """The sixteen frame coefficients of R predicted from the scalars."""
        fr = self.frame
        F, B, Bb = fr.F, fr.B, fr.Bb
        J, U, V, X, O, Y, E, H = (fr.horizontal[k] for k in "JUVXOYEH")
        Jb, Yb, Vb, Hb, Ob, Eb = (x.conj() for x in (J, Y, V, H, O, E))
        d0 = lambda s: F * fr.lam(s)  # noqa: E731  s_{|0}
        d0b = lambda s: F * fr.lamb(s)  # noqa: E731  s_{|0bar}
        return {
            "llll": self.K,
            "mmmm": self.W,
            "lmll": -(d0(Ob) / F - 0.5 * Ob * (J + Y)),
            "mlll": -(d0b(O) / F - 0.5 * O * (Jb + Yb)),
            "lllm": -fr.mu(Jb),
            "llml": -fr.mub(J),
            "llmm": -(fr.mub(V) + 0.5 * V * (Vb + Hb)),
            # the E terms pair l-bar (h) with the barred |0 derivative
            "mllm": -d0b(E) / F,
            "lmml": -d0(Eb) / F,
            "mmll": -(d0b(Y) / F + B * d0b(O) - 0.5 * F * B * O * (Jb + Yb)),
            "mlmm": -fr.mub(E),
            "mmml": -(d0(Hb) / F + 0.5 * Hb * (J + Y) + Bb * d0(Eb)),
            "lmmm": -fr.mu(Eb),
            "mmlm": -(d0b(H) / F + 0.5 * H * (Jb + Yb) + B * d0b(E)),
            "mlml": -(fr.mub(O) - 0.5 * O * (Vb + Hb)),
            "lmlm": -(fr.mu(Ob) - 0.5 * Ob * (V + H)),
        }

    def hh_decomposition(self) -> dict:
        fr = self.frame
        cov = {"l": (fr.l_dn, fr.l_dnb), "m": (fr.m_dn, fr.m_dnb)}
        coeffs = self.hh_coefficients()
        comps = self.hh_frame_components()
        recon = None
        for key, c in coeffs.items():
            a, b, cc, d = key
            term = c * jets.einsum("r,j,h,k->rjhk", cov[a][1], cov[b][0], cov[cc][1], cov[d][0])
            recon = term if recon is None else recon + term
        scale = max(1.0, max_abs(self.Rl))
        per_term = {k: abs(complex(coeffs[k].value) - complex(comps[k].value)) / scale for k in coeffs}
        return {"residual": _res(self.Rl, recon), "per_term": per_term}

    def phi_omega(self) -> dict:
        fr = self.frame
        F, A = fr.F, fr.A
        J, V, Y, H = (fr.horizontal[k] for k in "JVYH")
        phi = F * fr.lamb(A) + A * F * (J.conj() + Y.conj())
        omega = fr.mub(A) + A * (V.conj() + H.conj())
        return {"Phi": complex(phi.value), "Omega": complex(omega.value)}

    def I_horizontal(self) -> float:
        """max |I_{|k}| relative to the largest horizontal derivative of the two
        terms that make up I."""
        fr, geo = self.frame, self.geo
        parts = (fr.mb(fr.B), 0.5 * fr.B * fr.Bb)
        scale = max([1.0, abs(complex(self.I.value))] + [max_abs(geo.delta(p)) for p in parts])
        return max_abs(geo.delta(self.I, "I_|k")) / scale
