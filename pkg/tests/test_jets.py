import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cfinsler import jets
from cfinsler.errors import BranchError, CFinslerError, DomainError, OrderBudgetError
from cfinsler.jets import ETA, ETABAR, JetContext, WJet, conjugate, extract, seed
from cfinsler.metrics import eval_L_jet

from sampling import LABELS, points, spec_for


def idx(**orders):
    out = [0] * 8
    for name, k in orders.items():
        out[jets.VAR_NAMES.index(name)] = k
    return out


def vars_at(z=(0, 0), eta=(1, 0), order=6):
    return seed(JetContext(tuple(z), tuple(eta), order))


def close(a, b, tol=1e-12):
    a, b = np.asarray(a), np.asarray(b)
    return float(np.max(np.abs(a - b))) <= tol * max(1.0, float(np.max(np.abs(b))))


# -- seeding --------------------------------------------------------------------------


def test_seed_eta_unit_coefficient():
    v = vars_at()
    e1 = v[2]
    assert extract(e1, idx()) == 1
    assert extract(e1, idx(e1=1)) == 1
    assert extract(e1, idx(e2=1)) == 0


def test_seed_conjugate_values():
    v = vars_at(eta=(1 + 2j, 0))
    assert v[6].value == 1 - 2j


def test_seed_rejects_zero_section():
    with pytest.raises(DomainError):
        JetContext((0, 0), (0, 0), 6)


@pytest.mark.parametrize("order", [1, 11])
def test_context_order_range(order):
    with pytest.raises(CFinslerError):
        JetContext((0, 0), (1, 0), order)


def test_coefficient_count_order_six():
    assert jets.size(6) == 3003
    assert len(jets.basis(6)) == 3003


# -- arithmetic -----------------------------------------------------------------------


def test_product_of_eta_and_conjugate():
    v = vars_at(eta=(2, 0))
    p = v[2] * v[6]
    assert p.value == 4
    assert extract(p, idx(e1=1, eb1=1)) == 1


def test_self_division_is_one():
    v = vars_at(z=(0.3, -0.2j), eta=(1 + 1j, 0.5))
    j = jets.exp(v[0] * v[3]) + v[6] * v[6] + 2.0
    q = j / j
    assert close(q.coef[0], 1)
    assert np.max(np.abs(q.coef[1:])) < 1e-13


def test_fourth_mixed_partial_of_square():
    v = vars_at(eta=(0.7 - 0.2j, 1.0))
    L = (v[2] * v[6]) ** 2
    assert close(extract(L, idx(e1=2, eb1=2)), 4)


def test_sqrt_of_constant():
    c = WJet.constant(4.0, 6)
    assert close(jets.sqrt(c).coef, WJet.constant(2.0, 6).coef)


def test_log_exp_inverse_pair():
    v = vars_at(z=(0.2, 0.1j), eta=(1, 1j))
    j = v[0] * v[4] + 0.5 * v[2] - v[5] * v[3]
    back = jets.log(jets.exp(j))
    assert close(back.coef, j.coef)


def test_sqrt_derivative_example():
    v = vars_at(eta=(1, 1))
    f = jets.sqrt((v[2] * v[6]) ** 2 + (v[3] * v[7]) ** 2)
    assert close(extract(f, idx(e1=1)), 1 / math.sqrt(2))


def test_branch_precondition():
    v = vars_at(eta=(1, 0))
    with pytest.raises(BranchError):
        jets.sqrt(-1.0 * v[2] * v[6])
    with pytest.raises(BranchError):
        jets.log(WJet.constant(1j, 4))


# -- conjugation ----------------------------------------------------------------------


def test_conjugate_of_eta_is_etabar():
    v = vars_at(eta=(1 + 1j, 2))
    assert np.array_equal(conjugate(v[2]).coef, v[6].coef)


def test_conjugate_involution():
    v = vars_at(z=(0.1j, 0.4), eta=(1 - 1j, 2))
    j = jets.exp(v[0]) * v[3] + v[5] * v[7] * 1j
    assert np.array_equal(conjugate(conjugate(j)).coef, j.coef)


@pytest.mark.parametrize("label", LABELS)
def test_builtin_L_jets_are_real(label):
    z, e = points(label, 1, 5)[0]
    L = eval_L_jet(spec_for(label), JetContext(z, e, 6))
    assert close(conjugate(L).coef, L.coef, 1e-12)


# -- extraction and budget --------------------------------------------------------------


def test_extract_zero_index_is_value():
    v = vars_at(z=(0.5, 0), eta=(1, 2))
    j = v[0] * v[3]
    assert extract(j, idx()) == j.value


def test_extract_beyond_order():
    v = vars_at(order=6)
    with pytest.raises(OrderBudgetError):
        extract(v[2], idx(e1=7))


def test_diff_budget_names_quantity():
    j = WJet.constant(1.0, 2)
    j = j.diff(ETA[0], "first").diff(ETA[1], "second")
    with pytest.raises(OrderBudgetError, match="third"):
        j.diff(ETA[0], "third")


def test_grad_axis_and_values():
    v = vars_at(eta=(1, 2))
    L = v[2] * v[6] + 3 * v[3] * v[7]
    g = L.grad(ETA).grad(ETABAR)
    assert g.shape == (2, 2)
    assert close(g.value, np.diag([1, 3]))


def test_truncation_keeps_coefficients():
    v = vars_at(z=(0.3, 0.1), eta=(1, 0.5), order=8)
    f = jets.sqrt(v[2] * v[6] + v[3] * v[7]) * jets.exp(v[0] * v[4])
    low = seed(JetContext((0.3, 0.1), (1, 0.5), 6))
    g = jets.sqrt(low[2] * low[6] + low[3] * low[7]) * jets.exp(low[0] * low[4])
    assert close(f.truncate(6).coef, g.coef, 1e-12)
    with pytest.raises(OrderBudgetError):
        g.truncate(8)


# -- properties --------------------------------------------------------------------------

finite = st.floats(-2, 2, allow_nan=False)
cplx = st.builds(complex, finite, finite)


@settings(max_examples=40, deadline=None)
@given(cplx, cplx, cplx, cplx, st.integers(0, 7))
def test_leibniz_first_order(z1, z2, e1, e2, var):
    v = seed(JetContext((z1, z2), (e1 if abs(e1) > 1e-3 else 1, e2), 4))
    a = jets.exp(v[0] * 0.3) + v[2] * v[7]
    b = v[1] * v[5] - 2 * v[3] + 1.5
    d = np.zeros(8, int)
    d[var] = 1
    lhs = extract(a * b, d)
    rhs = a.value * extract(b, d) + extract(a, d) * b.value
    assert abs(lhs - rhs) <= 1e-12 * max(1.0, abs(lhs), abs(rhs))


@settings(max_examples=25, deadline=None)
@given(cplx, cplx, st.floats(0.2, 3), st.floats(-1.5, 1.5))
def test_pow_real_matches_exp_log(z1, e1, base, p):
    v = seed(JetContext((z1, 0.1), (1, e1), 5))
    x = v[2] * v[6] + base
    lhs = jets.pow_real(x, p)
    rhs = jets.exp(p * jets.log(x))
    assert close(lhs.coef, rhs.coef, 1e-11)


@settings(max_examples=25, deadline=None)
@given(cplx, cplx, st.integers(0, 3))
def test_derivative_commutes(z1, e1, k):
    v = seed(JetContext((z1, 0.2), (1, e1), 5))
    f = jets.exp(v[0] * v[6]) * (v[2] * v[6] + 1.0) + v[1] * v[4] * v[3]
    a = f.diff(k).diff(4 + k)
    b = f.diff(4 + k).diff(k)
    assert close(a.coef, b.coef, 1e-12)


@settings(max_examples=25, deadline=None)
@given(cplx, cplx)
def test_first_derivative_matches_central_difference(z1, e1):
    """d/deta1 of a smooth non-holomorphic function against a complex-step stencil."""
    e1 = e1 if abs(e1) > 0.1 else 1.0

    def f(x):
        return np.exp(0.2 * z1 * x) * (abs(x) ** 2 + 1) ** 0.5

    v = seed(JetContext((z1, 0), (e1, 1), 4))
    jf = jets.exp(0.2 * z1 * v[2]) * jets.sqrt(v[2] * v[6] + 1.0)
    h = 1e-6
    dre = (f(e1 + h) - f(e1 - h)) / (2 * h)
    dim = (f(e1 + 1j * h) - f(e1 - 1j * h)) / (2 * h)
    fd = 0.5 * (dre - 1j * dim)
    got = extract(jf, idx(e1=1))
    assert abs(got - fd) <= 1e-6 * max(1.0, abs(fd))
