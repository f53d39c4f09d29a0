"""Truncated multivariate Taylor series ("jets") in the eight Wirtinger variables.

A jet stores every Taylor coefficient of a function germ up to a fixed total
degree, in the variables

    z1, z2, e1, e2, conj(z1), conj(z2), conj(e1), conj(e2)

(``e`` is the fibre coordinate eta).  Barred variables are independent formal
variables while differentiating; they are tied to the conjugate base values
only through :func:`seed`.

Coefficients live in a dense array whose last axis enumerates multi-indices
graded by total degree, so a jet of order ``k`` is a prefix of length
``C(8 + k, 8)`` of any higher-order enumeration.  Leading axes carry tensor
indices: a ``(2, 2)`` jet is a 2x2 matrix of scalar jets and products and
contractions act on all components at once.
"""

from __future__ import annotations

import functools
import itertools
import math
import re
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import BranchError, CFinslerError, DomainError, OrderBudgetError

NVARS = 8
VAR_NAMES = ("z1", "z2", "e1", "e2", "zb1", "zb2", "eb1", "eb2")
MAX_ORDER = 10
DIV_TOL = 1e-300

# variable positions
Z = (0, 1)
ETA = (2, 3)
ZBAR = (4, 5)
ETABAR = (6, 7)


# ---------------------------------------------------------------------------
# multi-index bookkeeping
# ---------------------------------------------------------------------------


@functools.lru_cache(maxsize=None)
def _degree_block(d: int) -> np.ndarray:
    rows = []
    for combo in itertools.combinations_with_replacement(range(NVARS), d):
        row = [0] * NVARS
        for v in combo:
            row[v] += 1
        rows.append(row)
    return np.array(rows, dtype=np.int64).reshape(-1, NVARS)


@functools.lru_cache(maxsize=None)
def basis(order: int) -> np.ndarray:
    """All multi-indices of total degree <= order, graded, shape (n, 8)."""
    return np.concatenate([_degree_block(d) for d in range(order + 1)])


def size(order: int) -> int:
    return math.comb(NVARS + order, NVARS)


def _codes(idx: np.ndarray, base: int) -> np.ndarray:
    weights = base ** np.arange(NVARS, dtype=np.int64)
    return idx @ weights


@functools.lru_cache(maxsize=None)
def _lookup(order: int):
    b = basis(order)
    codes = _codes(b, order + 1)
    perm = np.argsort(codes, kind="stable")
    return codes[perm], perm


def index_of(idx: np.ndarray, order: int) -> np.ndarray:
    """Positions of multi-indices (rows of ``idx``) in ``basis(order)``."""
    sorted_codes, perm = _lookup(order)
    codes = _codes(np.asarray(idx, dtype=np.int64), order + 1)
    pos = np.searchsorted(sorted_codes, codes)
    return perm[pos]


@functools.lru_cache(maxsize=None)
def _mul_table(order: int):
    """Index pairs (p, q) with deg p + deg q <= order, grouped by target."""
    b = basis(order)
    deg = b.sum(axis=1)
    ps, qs = [], []
    for dp in range(order + 1):
        pp = np.nonzero(deg == dp)[0]
        qq = np.nonzero(deg <= order - dp)[0]
        P, Q = np.meshgrid(pp, qq, indexing="ij")
        ps.append(P.ravel())
        qs.append(Q.ravel())
    P = np.concatenate(ps)
    Q = np.concatenate(qs)
    T = index_of(b[P] + b[Q], order)
    srt = np.argsort(T, kind="stable")
    P, Q, T = P[srt], Q[srt], T[srt]
    starts = np.searchsorted(T, np.arange(len(b)))
    return P, Q, starts


@functools.lru_cache(maxsize=None)
def _diff_table(order: int, var: int):
    lower = basis(order - 1)
    shifted = lower.copy()
    shifted[:, var] += 1
    return index_of(shifted, order), (lower[:, var] + 1).astype(float)


@functools.lru_cache(maxsize=None)
def _conj_perm(order: int) -> np.ndarray:
    b = basis(order)
    swapped = np.concatenate([b[:, 4:], b[:, :4]], axis=1)
    return index_of(swapped, order)


@functools.lru_cache(maxsize=None)
def _factorials(order: int) -> np.ndarray:
    b = basis(order)
    fact = np.array([math.factorial(k) for k in range(order + 1)], dtype=float)
    return np.prod(fact[b], axis=1)


# ---------------------------------------------------------------------------
# the jet type
# ---------------------------------------------------------------------------


class WJet:
    """Tensor-valued truncated power series in the eight Wirtinger variables.

    ``coef`` has shape ``shape + (size(order),)``.  Instances are treated as
    immutable; every operation returns a new jet.
    """

    __slots__ = ("coef", "order")
    __array_priority__ = 100

    def __init__(self, coef, order: int):
        coef = np.asarray(coef, dtype=complex)
        if coef.shape[-1] != size(order):
            raise ValueError(
                f"coefficient axis has length {coef.shape[-1]}, "
                f"expected {size(order)} for order {order}"
            )
        self.coef = coef
        self.order = order

    # -- construction ------------------------------------------------------

    @classmethod
    def constant(cls, value, order: int) -> "WJet":
        value = np.asarray(value, dtype=complex)
        coef = np.zeros(value.shape + (size(order),), dtype=complex)
        coef[..., 0] = value
        return cls(coef, order)

    @classmethod
    def stack(cls, items: Sequence["WJet"]) -> "WJet":
        order = min(j.order for j in items)
        n = size(order)
        return cls(np.stack([j.coef[..., :n] for j in items]), order)

    # -- shape handling ----------------------------------------------------

    @property
    def shape(self):
        return self.coef.shape[:-1]

    @property
    def value(self):
        """Value at the base point (degree-0 coefficient)."""
        v = self.coef[..., 0]
        return v.item() if v.ndim == 0 else v.copy()

    def __getitem__(self, key) -> "WJet":
        if not isinstance(key, tuple):
            key = (key,)
        if len(key) > len(self.shape) or Ellipsis in key:
            raise IndexError("jet indexing addresses tensor axes only")
        return WJet(self.coef[key], self.order)

    def transpose(self, *axes) -> "WJet":
        return WJet(np.transpose(self.coef, tuple(axes) + (len(axes),)), self.order)

    def truncate(self, order: int) -> "WJet":
        if order > self.order:
            raise OrderBudgetError(f"cannot raise a jet from order {self.order} to {order}")
        return WJet(self.coef[..., : size(order)], order)

    def __repr__(self):
        return f"WJet(shape={self.shape}, order={self.order}, value={self.value!r})"

    # -- arithmetic --------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, WJet):
            order = min(self.order, other.order)
            n = size(order)
            return self.coef[..., :n], other.coef[..., :n], order
        return None

    def __add__(self, other):
        pair = self._coerce(other)
        if pair is not None:
            a, b, order = pair
            return WJet(a + b, order)
        other = np.asarray(other, dtype=complex)
        coef = np.array(np.broadcast_to(self.coef, np.broadcast_shapes(
            self.coef.shape, other.shape + (1,))), dtype=complex)
        coef[..., 0] += other
        return WJet(coef, self.order)

    __radd__ = __add__

    def __neg__(self):
        return WJet(-self.coef, self.order)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        pair = self._coerce(other)
        if pair is not None:
            a, b, order = pair
            return WJet(_cauchy(a, b, order), order)
        other = np.asarray(other, dtype=complex)
        return WJet(self.coef * other[..., None], self.order)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, WJet):
            return self * reciprocal(other)
        other = np.asarray(other, dtype=complex)
        return WJet(self.coef / other[..., None], self.order)

    def __rtruediv__(self, other):
        return reciprocal(self) * other

    def __pow__(self, p):
        return power(self, p)

    # -- calculus ----------------------------------------------------------

    def diff(self, var: int, what: str = "jet") -> "WJet":
        """Partial derivative in variable ``var``; the result loses one order."""
        if self.order < 1:
            raise OrderBudgetError(f"order budget exceeded while differentiating {what}")
        src, fac = _diff_table(self.order, var)
        return WJet(self.coef[..., src] * fac, self.order - 1)

    def grad(self, vars_: Sequence[int], what: str = "jet") -> "WJet":
        """Stack of partials along a new trailing tensor axis."""
        if self.order < 1:
            raise OrderBudgetError(f"order budget exceeded while differentiating {what}")
        parts = [self.diff(v, what) for v in vars_]
        return WJet(np.stack([p.coef for p in parts], axis=-2), self.order - 1)

    def conj(self) -> "WJet":
        return conjugate(self)


def _cauchy(a: np.ndarray, b: np.ndarray, order: int) -> np.ndarray:
    P, Q, starts = _mul_table(order)
    prod = a[..., P] * b[..., Q]
    return np.add.reduceat(prod, starts, axis=-1)


# ---------------------------------------------------------------------------
# free functions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class JetContext:
    """Base point ``(z, eta)`` and truncation order."""

    z: tuple
    eta: tuple
    order: int = 6

    def __post_init__(self):
        if not 2 <= self.order <= MAX_ORDER:
            raise CFinslerError(f"jet order must lie in [2, {MAX_ORDER}], got {self.order}")
        if len(self.z) != 2 or len(self.eta) != 2:
            raise CFinslerError("z and eta must each have two complex components")
        if all(abs(complex(e)) == 0 for e in self.eta):
            raise DomainError("eta = (0, 0) lies on the zero section")


def seed(ctx: JetContext) -> list:
    """The eight coordinate jets at the base point of ``ctx``."""
    z = [complex(v) for v in ctx.z]
    eta = [complex(v) for v in ctx.eta]
    values = z + eta + [v.conjugate() for v in z] + [v.conjugate() for v in eta]
    n = size(ctx.order)
    out = []
    for v, val in enumerate(values):
        coef = np.zeros(n, dtype=complex)
        coef[0] = val
        coef[1 + v] = 1.0
        out.append(WJet(coef, ctx.order))
    return out


def conjugate(a: WJet) -> WJet:
    """Bar operation: swap unbarred and barred blocks, conjugate coefficients."""
    return WJet(np.conj(a.coef[..., _conj_perm(a.order)]), a.order)


def extract(a: WJet, idx, what: str = "jet"):
    """Mixed partial derivative at the base point for multi-index ``idx``."""
    idx = np.asarray(idx, dtype=np.int64).reshape(NVARS)
    deg = int(idx.sum())
    if deg > a.order:
        raise OrderBudgetError(
            f"order budget exceeded: {what} needs degree {deg}, jet has order {a.order}"
        )
    pos = int(index_of(idx[None, :], a.order)[0])
    fact = float(np.prod([math.factorial(int(k)) for k in idx]))
    v = a.coef[..., pos] * fact
    return v.item() if np.ndim(v) == 0 else v


def _compose(a: WJet, series: list) -> WJet:
    """sum_n series[n] * (a - a0)**n, by Horner's rule."""
    u_coef = a.coef.copy()
    u_coef[..., 0] = 0.0
    u = WJet(u_coef, a.order)
    r = WJet.constant(series[-1], a.order)
    for c in reversed(series[:-1]):
        r = u * r + c
    return r


def _require_real_positive(a: WJet, name: str):
    c0 = np.asarray(a.coef[..., 0])
    bad = (c0.real <= 0) | (np.abs(c0.imag) > 1e-8 * np.abs(c0))
    if np.any(bad):
        raise BranchError(f"{name} applied to a non-real-positive value {c0[bad].ravel()[0]!r}")
    return c0


def reciprocal(a: WJet) -> WJet:
    c0 = np.asarray(a.coef[..., 0])
    if np.any(np.abs(c0) <= DIV_TOL):
        raise ZeroDivisionError("division by a jet with zero constant term")
    k = a.order
    series = [(-1) ** n / c0 ** (n + 1) for n in range(k + 1)]
    return _compose(a, series)


def pow_real(a: WJet, p: float) -> WJet:
    c0 = _require_real_positive(a, f"pow(., {p})")
    k = a.order
    series = [_binom(p, n) * c0 ** (p - n) for n in range(k + 1)]
    return _compose(a, series)


def power(a: WJet, p) -> WJet:
    """Integer powers by repeated squaring (any base); other reals via pow_real."""
    if float(p).is_integer():
        n = int(p)
        if n < 0:
            return reciprocal(power(a, -n))
        result = WJet.constant(np.ones(a.shape), a.order)
        base = a
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result
    return pow_real(a, float(p))


def _binom(p: float, n: int) -> float:
    out = 1.0
    for k in range(n):
        out *= (p - k) / (k + 1)
    return out


def sqrt(a: WJet) -> WJet:
    return pow_real(a, 0.5)


def log(a: WJet) -> WJet:
    c0 = _require_real_positive(a, "log")
    k = a.order
    series = [np.log(c0)] + [(-1) ** (n + 1) / (n * c0 ** n) for n in range(1, k + 1)]
    return _compose(a, series)


def exp(a: WJet) -> WJet:
    c0 = np.asarray(a.coef[..., 0])
    e0 = np.exp(c0)
    series = [e0 / math.factorial(n) for n in range(a.order + 1)]
    return _compose(a, series)


# ---------------------------------------------------------------------------
# contractions
# ---------------------------------------------------------------------------

_SUBSCRIPT = re.compile(r"^[a-zA-Z]*$")


def einsum(subscripts: str, *operands) -> WJet:
    """Tensor contraction of jets with truncated products.

    Follows :func:`numpy.einsum` notation over the tensor axes only, e.g.
    ``einsum("li,jlk->ijk", ginv, dg)``.  Operands are contracted pairwise
    from left to right.  Plain numpy arrays are accepted as constant tensors.
    """
    lhs, out = subscripts.replace(" ", "").split("->")
    terms = lhs.split(",")
    if len(terms) != len(operands):
        raise ValueError("subscript/operand count mismatch")
    for t in terms + [out]:
        if not _SUBSCRIPT.match(t):
            raise ValueError(f"bad subscript {t!r}")
    ops = list(operands)
    subs = list(terms)
    while len(ops) > 1:
        a, b = ops[0], ops[1]
        sa, sb = subs[0], subs[1]
        later = "".join(subs[2:]) + out
        keep = "".join(dict.fromkeys(c for c in sa + sb if c in later))
        ops = [_pair(sa, sb, keep, a, b)] + ops[2:]
        subs = [keep] + subs[2:]
    (only,), (s,) = ops, subs
    if s == out:
        return only
    return _pair(s, "", out, only, None)


def _pair(sa: str, sb: str, out: str, a, b) -> WJet:
    if b is None:
        return WJet(np.einsum(f"{sa}...->{out}...", a.coef), a.order)
    a_jet, b_jet = isinstance(a, WJet), isinstance(b, WJet)
    if a_jet and b_jet:
        order = min(a.order, b.order)
        n = size(order)
        P, Q, starts = _mul_table(order)
        prod = np.einsum(f"{sa}P,{sb}P->{out}P", a.coef[..., :n][..., P], b.coef[..., :n][..., Q])
        return WJet(np.add.reduceat(prod, starts, axis=-1), order)
    if a_jet:
        return WJet(np.einsum(f"{sa}P,{sb}->{out}P", a.coef, np.asarray(b, dtype=complex)), a.order)
    if b_jet:
        return WJet(np.einsum(f"{sa},{sb}P->{out}P", np.asarray(a, dtype=complex), b.coef), b.order)
    raise ValueError("at least one operand must be a jet")


def det2(m: WJet) -> WJet:
    return m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]


def inv2(m: WJet):
    """Closed-form inverse of a 2x2 jet matrix; returns (inverse, det)."""
    d = det2(m)
    rd = reciprocal(d)
    adj = WJet.stack([WJet.stack([m[1, 1], -m[0, 1]]), WJet.stack([-m[1, 0], m[0, 0]])])
    return adj * rd, d
