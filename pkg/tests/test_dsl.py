import cmath

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cfinsler import dsl
from cfinsler.errors import ArityError, LexError, ParseError, UnknownIdentifierError
from cfinsler.jets import JetContext
from cfinsler.metrics import builtin, eval_L, eval_L_jet, parse_metric


def test_euclidean_source_matches_builtin():
    user = parse_metric("L = e1*conj(e1) + e2*conj(e2)")
    ref = builtin("euclidean")
    for z, e in [((0, 0), (1, 0)), ((0.3j, 2), (1 - 1j, 0.5))]:
        assert abs(eval_L(user, z, e) - eval_L(ref, z, e)) < 1e-15


def test_let_binding_gives_as_metric():
    user = parse_metric("let s = 0\nL = exp(2*s) * sqrt(abs2(e1)^2 + abs2(e2)^2)")
    assert abs(eval_L(user, (0, 0), (1, 1)) - np.sqrt(2)) < 1e-15


def test_dangling_operator_points_at_operator():
    with pytest.raises(ParseError) as info:
        dsl.parse("L = e1 +")
    assert (info.value.line, info.value.col) == (1, 8)


@pytest.mark.parametrize("src, exc, where", [
    ("L = e1 $ e2", LexError, (1, 8)),
    ("L = (e1", ParseError, (1, 8)),
    ("let a = 1\nL = e1 * b", UnknownIdentifierError, (2, 10)),
    ("L = foo(e1)", UnknownIdentifierError, (1, 5)),
    ("L = exp(e1, e2)", ArityError, (1, 5)),
    ("L = sqrt()", ArityError, (1, 5)),
    ("let e1 = 2\nL = e1", ParseError, (1, 5)),
    ("let a = 2\nL = e1", ParseError, (1, 5)),
    ("L = e1 e2", ParseError, (1, 8)),
    ("M = e1", ParseError, (1, 1)),
])
def test_errors_carry_location(src, exc, where):
    with pytest.raises(exc) as info:
        dsl.parse(src)
    assert (info.value.line, info.value.col) == where
    assert f"line {where[0]}, column {where[1]}" in str(info.value)


def test_comments_and_blank_lines():
    prog = dsl.parse("# header\n\nlet a = abs2(e1)  # inline\n\nL = a + abs2(e2)\n")
    assert [n for n, _ in prog.lets] == ["a"]


def test_imaginary_unit_and_re_im():
    spec = parse_metric("L = abs2(e1) + abs2(e2) + re(i*z1)*0 + im(z2)*0")
    assert abs(eval_L(spec, (1j, 2j), (1, 1)) - 2) < 1e-15


def test_free_variables_follow_lets():
    prog = dsl.parse("let a = z1*e1\nlet b = a + 1\nL = abs2(b)")
    assert dsl.free_variables(prog.body, dict(prog.lets)) == {"z1", "e1"}


def test_negative_exponent():
    spec = parse_metric("L = (abs2(e1) + abs2(e2))^2 * (1 + abs2(z1))^-1")
    assert abs(eval_L(spec, (1, 0), (1, 0)) - 0.5) < 1e-15


# -- property: jets and plain numbers agree on random expressions ---------------------

_atoms = st.sampled_from(["e1", "e2", "z1", "z2", "conj(e1)", "conj(z2)", "2", "0.5", "i"])


def _expr(depth):
    if depth == 0:
        return _atoms
    sub = _expr(depth - 1)
    return st.one_of(
        _atoms,
        st.builds(lambda a, b, op: f"({a} {op} {b})", sub, sub, st.sampled_from("+-*")),
        st.builds(lambda a: f"abs2({a})", sub),
        st.builds(lambda a: f"exp(0.1*{a})", sub),
    )


@settings(max_examples=60, deadline=None)
@given(_expr(3))
def test_jet_value_matches_numeric_evaluation(expr):
    spec = parse_metric(f"L = 1 + abs2({expr})")
    z, e = (0.3 - 0.1j, 0.2j), (0.7 + 0.4j, -0.5 + 1j)
    num = eval_L(spec, z, e)
    jet = eval_L_jet(spec, JetContext(z, e, 2)).value
    assert cmath.isclose(num, jet, rel_tol=1e-12, abs_tol=1e-12)
