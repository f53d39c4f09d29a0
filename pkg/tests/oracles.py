"""Independent closed forms used as test oracles.

Everything here is written out by hand from the metric formulas, without the
jet machinery, so agreement with the library is a genuine cross-check.  Points
are (z, eta) with z = (z, w) and eta = (eta, theta).
"""

from __future__ import annotations

import numpy as np


def abs2(x: complex) -> float:
    return abs(x) ** 2


# -- potentials sigma(z, w) for the Antonelli-Shimada presets ---------------------
# each entry: sigma, (d sigma/dz, d sigma/dw), Hessian h[k, h] = d^2 sigma / dz^k dzbar^h


def sigma_data(preset: str, z) -> tuple[float, np.ndarray, np.ndarray]:
    a, b = complex(z[0]), complex(z[1])
    if preset == "const":
        return 0.0, np.zeros(2, complex), np.zeros((2, 2), complex)
    if preset == "hartogs-log":
        d = abs2(a) - abs2(b)
        s = -np.log(1 - abs2(a)) - np.log(d)
        grad = np.array([a.conjugate() / (1 - abs2(a)) - a.conjugate() / d, b.conjugate() / d])
        hess = np.array([
            [1 / (1 - abs2(a)) ** 2 + abs2(b) / d ** 2, -a.conjugate() * b / d ** 2],
            [-a * b.conjugate() / d ** 2, abs2(a) / d ** 2],
        ])
        return float(s), grad, hess
    if preset == "disk-log":
        D = 1 - abs2(a) - abs2(b)
        s = np.log(D)
        grad = np.array([-a.conjugate() / D, -b.conjugate() / D])
        hess = np.array([
            [-(1 - abs2(b)) / D ** 2, -a.conjugate() * b / D ** 2],
            [-a * b.conjugate() / D ** 2, -(1 - abs2(a)) / D ** 2],
        ])
        return float(s), grad, hess
    if preset == "harmonic":
        s = (a * b).real
        return float(s), np.array([b / 2, a / 2]), np.zeros((2, 2), complex)
    raise KeyError(preset)


# -- Antonelli-Shimada metric ---------------------------------------------------------


def as_closed_forms(preset: str, z, eta) -> dict:
    """g, ginv (ginv[j, k] = g^{jbar k}), l, m, L^i_{jk}, C^i_{jk}, A, B, I, K, W."""
    s, ds, hs = sigma_data(preset, z)
    e, t = complex(eta[0]), complex(eta[1])
    ae, at = abs(e), abs(t)
    E8 = np.exp(8 * s)
    E4 = np.exp(4 * s)
    L = np.exp(2 * s) * np.sqrt(ae ** 4 + at ** 4)
    F = np.sqrt(L)

    g = np.array([
        [E8 * ae ** 2 * (ae ** 4 + 2 * at ** 4) / L ** 3, -E8 * ae ** 2 * at ** 2 * e.conjugate() * t / L ** 3],
        [-E8 * ae ** 2 * at ** 2 * e * t.conjugate() / L ** 3, E8 * at ** 2 * (2 * ae ** 4 + at ** 4) / L ** 3],
    ])
    ginv = np.array([
        [(2 * ae ** 4 + at ** 4) / (2 * ae ** 2 * L), e.conjugate() * t / (2 * L)],
        [e * t.conjugate() / (2 * L), (ae ** 4 + 2 * at ** 4) / (2 * at ** 2 * L)],
    ])
    det = 2 * E8 * ae ** 2 * at ** 2 / L ** 2

    l_up = np.array([e, t]) / F
    l_dn = np.array([E4 * ae ** 2 * e.conjugate(), E4 * at ** 2 * t.conjugate()]) / F ** 3
    m_up = np.array([-at * t.conjugate() / (np.sqrt(2) * ae * F), ae * e.conjugate() / (np.sqrt(2) * at * F)])
    m_dn = np.array([-2 * E4 * ae * at * t, 2 * E4 * ae * at * e]) / (np.sqrt(2) * F ** 3)

    Lh = np.zeros((2, 2, 2), complex)
    for i in range(2):
        for k in range(2):
            Lh[i, i, k] = 2 * ds[k]

    C = np.zeros((2, 2, 2), complex)
    L4 = L ** 4
    C[0, 0, 0] = E8 * at ** 8 * e.conjugate() / (ae ** 2 * L4)
    C[0, 0, 1] = C[0, 1, 0] = -E8 * at ** 6 * t.conjugate() / L4
    C[0, 1, 1] = E8 * at ** 4 * t.conjugate() ** 2 * e / L4
    C[1, 1, 1] = E8 * ae ** 8 * t.conjugate() / (at ** 2 * L4)
    C[1, 0, 1] = C[1, 1, 0] = -E8 * ae ** 6 * e.conjugate() / L4
    C[1, 0, 0] = E8 * ae ** 4 * e.conjugate() ** 2 * t / L4

    A = e.conjugate() ** 2 * t.conjugate() ** 2 / (2 * ae ** 2 * at ** 2 * F)
    B = e.conjugate() * t.conjugate() * (ae ** 4 - at ** 4) / (np.sqrt(2) * ae ** 3 * at ** 3 * F)

    v = np.array([e, t])
    quad = float(np.real(v @ hs @ v.conj()))
    K = -2 / L * quad
    W = -K / 2 - np.exp(-4 * s) * L / (ae ** 2 * at ** 2) * float(np.real(hs[0, 0] * at ** 2 + hs[1, 1] * ae ** 2))

    # J = l^j l^k l_i L^i_{jk} = 2 sigma_k l^k
    J = 2 * (ds @ v) / F
    H = -np.sqrt(2) / (ae * at * F) * (ds[0] * at ** 2 * t.conjugate() - ds[1] * ae ** 2 * e.conjugate())
    return {"L": L, "F": F, "g": g, "ginv": ginv, "det": det, "l_up": l_up, "l_dn": l_dn,
            "m_up": m_up, "m_dn": m_dn, "Lh": Lh, "C": C, "A": A, "B": B,
            "I": 2 / L, "Kv_m": 4 / L, "K": K, "W": W, "J": J, "Y": J, "E": 0.0, "O": 0.0,
            "H": H, "V": H}


# -- Hartogs triangle metrics ---------------------------------------------------------


def hartogs_ab(z, eta):
    """alpha^2 and beta for the Kaehler purely Hermitian metric on the Hartogs triangle."""
    a, b = complex(z[0]), complex(z[1])
    e, t = complex(eta[0]), complex(eta[1])
    d = abs2(a) - abs2(b)
    beta = (b * e - a * t) / d
    alpha2 = abs2(e) / (1 - abs2(a)) ** 2 + abs2(beta)
    return alpha2, beta


def hartogs_ainv_zz(z) -> float:
    return (1 - abs2(complex(z[0]))) ** 2


def hartogs_b_norm2(z) -> float:
    """||b||^2 = a^{jbar i} b_i conj(b_j); equals 1 on the whole triangle."""
    a, b = complex(z[0]), complex(z[1])
    d = abs2(a) - abs2(b)
    bl = np.array([b / d, -a / d])
    amat = np.array([
        [1 / (1 - abs2(a)) ** 2 + abs2(bl[0]), bl[0] * bl[1].conjugate()],
        [bl[1] * bl[0].conjugate(), abs2(bl[1])],
    ])
    ainv = np.linalg.inv(amat)
    return float(np.real(bl @ ainv.T @ bl.conj()))


# L^w_{zz} is left out: the component vanishes identically at w = 0, which the
# closed form 1/(1-|z|^2) + 1/(|z|^2-|w|^2) does not.
HARTOGS_CONNECTION_CHECKED = ((0, 0, 0), (0, 0, 1), (0, 1, 0), (0, 1, 1), (1, 0, 1), (1, 1, 0), (1, 1, 1))


def hartogs_connection(z) -> np.ndarray:
    """Lh[i, j, k] = L^i_{jk} of the Hartogs metrics (shared by Randers and Kropina);
    only the entries in HARTOGS_CONNECTION_CHECKED are meaningful."""
    a, b = complex(z[0]), complex(z[1])
    d = abs2(a) - abs2(b)
    Lh = np.zeros((2, 2, 2), complex)
    Lh[0, 0, 0] = 2 * a.conjugate() / (1 - abs2(a))
    Lh[1, 0, 1] = Lh[1, 1, 0] = -(abs2(a) + abs2(b)) / (a * d)
    Lh[1, 1, 1] = 2 * b.conjugate() / d
    return Lh


def hartogs_spray_z(z, eta) -> complex:
    a = complex(z[0])
    return a.conjugate() * complex(eta[0]) ** 2 / (1 - abs2(a))
