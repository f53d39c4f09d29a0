import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cfinsler import metrics
from cfinsler.errors import CFinslerError, DomainError
from cfinsler.geometry import Geometry
from cfinsler.jets import JetContext
from cfinsler.metrics import (builtin, eval_L, eval_L_jet, list_builtins, parse_metric,
                              pulled_back, validate_homogeneity)

from oracles import hartogs_ab, hartogs_ainv_zz, hartogs_b_norm2
from sampling import LABELS, points, spec_for


def test_five_builtins():
    names = [s.name for s in list_builtins()]
    assert names == ["euclidean", "antonelli-shimada", "hartogs-hermitian",
                     "hartogs-randers", "hartogs-kropina"]


def test_hartogs_domain_description():
    for name in ("hartogs-hermitian", "hartogs-randers", "hartogs-kropina"):
        assert "|z2| < |z1| < 1" in [c.description for c in builtin(name).domain]


def test_as_has_sigma_parameter():
    assert "sigma" in metrics.builtin_parameters("antonelli-shimada")
    assert builtin("antonelli-shimada", sigma="harmonic").params == (("sigma", "harmonic"),)


def test_randers_source_is_alpha_plus_abs_beta():
    spec = builtin("hartogs-randers")
    z, e = (0.6, 0.2j), (1, 0.5 - 0.5j)
    alpha2, beta = hartogs_ab(z, e)
    assert abs(eval_L(spec, z, e) - (np.sqrt(alpha2) + abs(beta)) ** 2) < 1e-12


def test_kropina_source():
    spec = builtin("hartogs-kropina")
    z, e = (0.6, 0.2j), (1, 0.5 - 0.5j)
    alpha2, beta = hartogs_ab(z, e)
    assert abs(eval_L(spec, z, e) - alpha2 ** 2 / abs(beta) ** 2) < 1e-10


def test_euclidean_jet_value_and_g():
    L = eval_L_jet(builtin("euclidean"), JetContext((0, 0), (1, 0), 4))
    assert L.value == 1
    geo = Geometry(builtin("euclidean"), (0, 0), (1, 0), 4)
    assert np.allclose(geo.g.value, np.eye(2), atol=1e-15)


def test_as_value_at_unit_eta():
    spec = builtin("antonelli-shimada", sigma="0")
    assert abs(eval_L(spec, (0.4, 0.1j), (1, 1)) - np.sqrt(2)) < 1e-15


def test_domain_violations():
    with pytest.raises(DomainError):
        eval_L_jet(builtin("hartogs-randers"), JetContext((0.1, 0.5), (1, 1), 4))
    with pytest.raises(DomainError):
        eval_L_jet(builtin("antonelli-shimada"), JetContext((0, 0), (1, 0), 4))
    with pytest.raises(DomainError):
        eval_L_jet(builtin("antonelli-shimada", sigma="disk-log"), JetContext((0.8, 0.7), (1, 1), 4))
    # beta vanishes on the slit z2*eta1 = z1*eta2
    with pytest.raises(DomainError, match="beta"):
        eval_L_jet(builtin("hartogs-randers"), JetContext((0.5, 0.1), (1, 0.2), 4))


def test_unknown_builtin_and_bad_sigma():
    with pytest.raises(CFinslerError):
        builtin("nope")
    with pytest.raises(CFinslerError):
        builtin("antonelli-shimada", sigma="abs2(e1)")
    with pytest.raises(CFinslerError):
        builtin("euclidean", sigma="0")


def test_non_positive_L_is_domain_error():
    spec = parse_metric("L = abs2(e1) - 2*abs2(e2)")
    with pytest.raises(DomainError):
        eval_L_jet(spec, JetContext((0, 0), (0.1, 1), 4))


@pytest.mark.parametrize("label", LABELS)
def test_builtin_homogeneity(label):
    worst = 0.0
    for z, e in points(label, 5, 2):
        worst = max(worst, max(validate_homogeneity(spec_for(label), z, e).values()))
    assert worst <= (1e-12 if label == "euclidean" else 1e-9)


def test_non_homogeneous_negative_control():
    spec = parse_metric("L = abs2(e1) + sqrt(abs2(e1)) + abs2(e2)")
    res = validate_homogeneity(spec, (0, 0), (0.7, 1.2))
    assert max(res.values()) > 1e-3


@pytest.mark.parametrize("label", LABELS)
def test_L_real_positive_g_hermitian_definite(label):
    spec = spec_for(label)
    for z, e in points(label, 100, 7):
        L = eval_L(spec, z, e)
        assert L.real > 0 and abs(L.imag) <= 1e-9 * (1 + abs(L.real))
        g = Geometry(spec, z, e, 2).g.value
        assert np.max(np.abs(g - g.conj().T)) <= 1e-12 * np.max(np.abs(g))
        assert g[0, 0].real > 0 and np.linalg.det(g).real > 0


def test_randers_alpha_beta_identity():
    for z, e in points("hartogs-randers", 50, 3):
        alpha2, beta = hartogs_ab(z, e)
        lhs = alpha2 - abs(beta) ** 2
        rhs = abs(e[0]) ** 2 / (1 - abs(z[0]) ** 2) ** 2
        assert abs(lhs - rhs) <= 1e-9 * abs(rhs)


def test_hermitian_inverse_and_b_norm():
    spec = builtin("hartogs-hermitian")
    for z, e in points("hartogs-hermitian", 20, 3):
        ginv = Geometry(spec, z, e, 2).ginv.value
        assert abs(ginv[0, 0] - hartogs_ainv_zz(z)) <= 1e-9 * hartogs_ainv_zz(z)
        assert abs(hartogs_b_norm2(z) - 1) <= 1e-9
    ginv = Geometry(spec, (0.5, 0.1), (1, 1), 2).ginv.value
    assert abs(ginv[0, 0] - 0.5625) < 1e-12


def test_pulled_back_moves_points():
    spec = builtin("hartogs-hermitian")
    M = np.array([[2, 1j], [0, 0.5]])
    moved = pulled_back(spec, M)
    z, e = (0.6, 0.2), (1, 1j)
    z2, e2 = tuple(M @ np.array(z)), tuple(M @ np.array(e))
    assert abs(eval_L(moved, z2, e2) - eval_L(spec, z, e)) < 1e-12
    assert moved.admits(z2, e2) and not moved.admits(z, (0, 0))
    twice = pulled_back(moved, np.linalg.inv(M))
    assert abs(eval_L(twice, z, e) - eval_L(spec, z, e)) < 1e-12


def test_pulled_back_rejects_singular():
    with pytest.raises(CFinslerError):
        pulled_back(builtin("euclidean"), [[1, 2], [2, 4]])


@settings(max_examples=30, deadline=None)
@given(st.floats(0.05, 0.95), st.floats(0, 0.9), st.floats(-3, 3), st.floats(-3, 3))
def test_hartogs_membership(r1, frac, a1, a2):
    z = (r1 * np.exp(1j * a1), frac * r1 * np.exp(1j * a2))
    assert builtin("hartogs-hermitian").admits(z, (1, 1))
    assert not builtin("hartogs-hermitian").admits((z[1], z[0]), (1, 1))
