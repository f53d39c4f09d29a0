import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cfinsler.fdcheck import fd_check_point, fd_connection, fd_fundamental_tensor, truncation_stability
from cfinsler.geometry import Geometry
from cfinsler.metrics import builtin, parse_metric

from sampling import LABELS, points, spec_for

FD_TOL = 1e-5


@pytest.mark.parametrize("label", LABELS)
def test_jets_agree_with_finite_differences(label):
    spec = spec_for(label)
    for z, e in points(label, 5, 3):
        res = fd_check_point(spec, z, e)
        assert max(res.values()) <= FD_TOL, res


@pytest.mark.parametrize("label", LABELS)
def test_truncation_stability(label):
    spec = spec_for(label)
    for z, e in points(label, 2, 3):
        assert max(truncation_stability(spec, z, e).values()) <= 1e-10


def test_finite_differences_detect_a_wrong_metric():
    z, e = (0.6, 0.2j), (1, 0.4 - 0.3j)
    right = builtin("hartogs-randers")
    geo = Geometry(right, z, e, 4)
    kropina = builtin("hartogs-kropina")
    assert np.max(np.abs(geo.g.value - fd_fundamental_tensor(kropina, z, e))) > 1e-2
    # Randers and Kropina share their nonlinear connection, Euclidean does not
    assert np.max(np.abs(geo.N.value - fd_connection(kropina, z, e)["N"])) <= 1e-8
    assert np.max(np.abs(geo.N.value - fd_connection(builtin("euclidean"), z, e)["N"])) > 1e-2


def test_euclidean_connection_by_differences_is_zero():
    conn = fd_connection(builtin("euclidean"), (0.3, 0.1j), (1, 2))
    assert np.max(np.abs(conn["N"])) <= 1e-9
    assert np.max(np.abs(conn["L"])) <= 1e-9


finite = st.floats(-0.6, 0.6)


@settings(max_examples=15, deadline=None)
@given(finite, finite, finite, finite, st.floats(0.2, 2.0))
def test_fd_on_random_conformal_metrics(a, b, c, d, k):
    """exp(k re(...)) conformal Hermitian metrics: jets match differences everywhere."""
    spec = parse_metric(f"L = exp({k}*re(z1*conj(z2)) + abs2(z1)) * (abs2(e1) + 2*abs2(e2))")
    z, e = (complex(a, b), complex(c, d)), (1 + 0.5j, -0.7)
    assert max(fd_check_point(spec, z, e).values()) <= FD_TOL
