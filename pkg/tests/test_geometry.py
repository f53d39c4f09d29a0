import numpy as np
import pytest

from cfinsler import jets
from cfinsler.errors import DegenerateMetricError
from cfinsler.geometry import Geometry, metric_compatibility_residuals, rel_residual
from cfinsler.jets import WJet
from cfinsler.metrics import builtin, parse_metric

from oracles import HARTOGS_CONNECTION_CHECKED, as_closed_forms, hartogs_connection, hartogs_spray_z
from sampling import AS_PRESETS, LABELS, points, spec_for, strict_rel

TOL = 1e-10


def geometries(label, count, seed=0, order=6):
    spec = spec_for(label)
    return [Geometry(spec, z, e, order) for z, e in points(label, count, seed)]


@pytest.fixture(scope="module", params=LABELS)
def geos(request):
    return request.param, geometries(request.param, 8, 11)


def test_inverse_at_all_degrees(geos):
    _, gs = geos
    for geo in gs:
        prod = jets.einsum("ij,jk->ik", geo.g, geo.ginv)
        ident = WJet.constant(np.eye(2), prod.order)
        assert rel_residual(prod - ident) == 0.0 or np.max(np.abs((prod - ident).coef)) <= TOL * max(
            1.0, np.max(np.abs(geo.g.coef)) * np.max(np.abs(geo.ginv.coef)))


def test_base_point_structure(geos):
    _, gs = geos
    for geo in gs:
        g = geo.g.value
        assert np.max(np.abs(g - g.conj().T)) <= 1e-12 * np.max(np.abs(g))
        det = complex(geo.det.value)
        assert det.real > 0 and abs(det.imag) <= 1e-12 * det.real
        L = jets.einsum("ij,i,j->", geo.g, geo.eta, geo.etabar)
        assert rel_residual(L - geo.L.truncate(L.order), geo.L) <= TOL


def test_connection_identities(geos):
    _, gs = geos
    for geo in gs:
        assert rel_residual(geo.N - jets.einsum("ijk,j->ik", geo.Lh, geo.eta), geo.N) <= TOL
        assert rel_residual(geo.de(geo.N).transpose(0, 2, 1) - geo.Lh, geo.Lh) <= 1e-9
        assert rel_residual(jets.einsum("ijk,j->ik", geo.C, geo.eta), geo.C) <= TOL
        assert rel_residual(jets.einsum("ijk,k->ij", geo.C, geo.eta), geo.C) <= TOL
        two_G = 2 * geo.G
        assert rel_residual(two_G - jets.einsum("ij,j->i", geo.N, geo.eta), geo.N) <= TOL
        assert rel_residual(two_G - jets.einsum("ij,j->i", geo.Nc, geo.eta), geo.Nc) <= TOL
        assert rel_residual(two_G - jets.einsum("ijk,j,k->i", geo.BL, geo.eta, geo.eta), geo.BL) <= 1e-9
        assert rel_residual(geo.BL - geo.BL.transpose(0, 2, 1), geo.BL) <= TOL


def test_metric_compatibility_50_points():
    for label in LABELS:
        for geo in geometries(label, 50, 4, order=3):
            assert max(metric_compatibility_residuals(geo).values()) <= 1e-9, label


def test_eta_and_gbar_eta_derivatives(geos):
    _, gs = geos
    for geo in gs:
        eye = WJet.constant(np.eye(2), geo.eta.order)
        assert rel_residual(geo.cov_h(geo.eta, "U"), geo.N) <= TOL
        assert rel_residual(geo.cov_hbar(geo.eta, "U"), geo.N) <= TOL
        assert rel_residual(geo.cov_vbar(geo.eta, "U"), geo.C) <= TOL
        assert rel_residual(geo.cov_v(geo.eta, "U") - eye) <= TOL
        g_eb = jets.einsum("ij,j->i", geo.g, geo.etabar)
        assert rel_residual(geo.cov_vbar(g_eb, "D") - geo.g, geo.g) <= 1e-9


def test_euclidean_connection_vanishes():
    geo = Geometry(builtin("euclidean"), (0.3, -0.2j), (1, 2j), 6)
    for X in (geo.N, geo.Lh, geo.C, geo.G, geo.T, geo.BL, geo.RL):
        assert np.max(np.abs(X.value)) == 0.0
    assert np.max(np.abs(geo.delta(geo.L).value)) == 0.0
    assert np.max(np.abs(geo.delta(WJet.constant(3.0, 4)).coef)) == 0.0


@pytest.mark.parametrize("label", ["hartogs-randers", "hartogs-kropina"])
def test_hartogs_connection_closed_form(label):
    for geo in geometries(label, 10, 5):
        ref = hartogs_connection(geo.z)
        got = geo.Lh.value
        for ijk in HARTOGS_CONNECTION_CHECKED:
            assert abs(got[ijk] - ref[ijk]) <= 1e-9 * max(1.0, abs(ref[ijk])), ijk
        assert abs(geo.G.value[0] - hartogs_spray_z(geo.z, geo.ctx.eta)) <= 1e-9 * max(1, abs(geo.G.value[0]))
        assert rel_residual(geo.dG_bar, geo.N) <= 1e-9
        assert rel_residual(geo.T, geo.Lh) <= 1e-9


def test_randers_berwald_rund_equal_chern_finsler():
    for geo in geometries("hartogs-randers", 10, 5):
        assert rel_residual(geo.BL - geo.Lh, geo.Lh) <= 1e-8
        assert rel_residual(geo.RL - geo.Lh, geo.Lh) <= 1e-8


def test_randers_vanishing_component_on_axis():
    geo = Geometry(builtin("hartogs-randers"), (0.5 + 0.2j, 0), (1, 0.7), 4)
    assert abs(geo.Lh.value[1, 0, 0]) <= 1e-12


@pytest.mark.parametrize("preset", AS_PRESETS)
def test_as_connection_closed_form(preset):
    for geo in geometries(f"as-{preset}", 10, 5):
        ref = as_closed_forms(preset, geo.z, geo.ctx.eta)
        assert np.max(np.abs(geo.Lh.value - ref["Lh"])) <= 1e-9 * max(1.0, np.max(np.abs(ref["Lh"])))
        assert strict_rel(geo.C.value, ref["C"]) <= 1e-9
        # B-L depends on z only
        assert rel_residual(geo.de(geo.BL), geo.BL) <= 1e-9
        assert rel_residual(geo.BLbar, geo.BL) <= 1e-9


def test_as_constant_sigma_is_locally_minkowski():
    for geo in geometries("as-const", 5, 5):
        assert np.max(np.abs(geo.BL.value)) <= 1e-12
        assert np.max(np.abs(geo.BLbar.value)) <= 1e-12
        assert np.max(np.abs(geo.N.value)) <= 1e-12


def test_as_hartogs_sigma_has_torsion():
    for geo in geometries("as-hartogs-log", 5, 5):
        assert np.max(np.abs(geo.T.value)) > 1e-3


def test_degenerate_metric():
    spec = parse_metric("L = abs2(e1 + e2)")
    with pytest.raises(DegenerateMetricError):
        Geometry(spec, (0, 0), (1, 0.5), 4)


def test_indefinite_metric():
    spec = parse_metric("L = 2*abs2(e1) - abs2(e2)")
    with pytest.raises(DegenerateMetricError):
        Geometry(spec, (0, 0), (1, 0.1), 4)
