"""Built-in metrics, user metrics from the expression language, and domain checks."""

from __future__ import annotations

import cmath
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from . import dsl, jets
from .errors import BranchError, CFinslerError, DomainError
from .jets import JetContext, WJet

REALITY_TOL = 1e-9


@dataclass(frozen=True)
class DomainConstraint:
    """A named predicate on base points ``(z, eta)``."""

    description: str
    predicate: Callable = field(compare=False)
    # scale-free distance to the excluded set; None when not meaningful
    clearance: Callable | None = field(default=None, compare=False)

    def admits(self, z, eta) -> bool:
        return bool(self.predicate(np.asarray(z, complex), np.asarray(eta, complex)))

    def distance(self, z, eta) -> float:
        if self.clearance is None:
            return float("inf")
        return float(self.clearance(np.asarray(z, complex), np.asarray(eta, complex)))


@dataclass(frozen=True)
class MetricSpec:
    name: str
    source: str
    params: tuple = ()
    domain: tuple = ()
    program: dsl.Program = field(default=None, compare=False, repr=False)
    description: str = ""
    # rows of Minv: the metric is evaluated at (Minv z, Minv eta)
    pullback: tuple | None = None

    def source_point(self, z, eta):
        """Coordinates at which the underlying expression is evaluated."""
        if self.pullback is None:
            return z, eta
        Minv = np.asarray(self.pullback, complex)
        return tuple(Minv @ np.asarray(z, complex)), tuple(Minv @ np.asarray(eta, complex))

    def admits(self, z, eta) -> bool:
        z, eta = self.source_point(z, eta)
        return all(c.admits(z, eta) for c in self.domain)

    def clearance(self, z, eta) -> float:
        """Smallest scale-free distance to any excluded set (inf if none is measured)."""
        z, eta = self.source_point(z, eta)
        return min((c.distance(z, eta) for c in self.domain), default=float("inf"))

    def check_domain(self, z, eta):
        z, eta = self.source_point(z, eta)
        for c in self.domain:
            if not c.admits(z, eta):
                raise DomainError(f"point z={tuple(z)}, eta={tuple(eta)} violates {c.description!r}")


# -- domains ---------------------------------------------------------------

_HARTOGS = DomainConstraint(
    "|z2| < |z1| < 1", lambda z, e: abs(z[1]) < abs(z[0]) < 1,
    lambda z, e: min(1 - abs(z[0]), 1 - abs(z[1]) / abs(z[0])) if abs(z[0]) > 0 else 0.0,
)
_BALL = DomainConstraint(
    "|z1|^2 + |z2|^2 < 1", lambda z, e: abs(z[0]) ** 2 + abs(z[1]) ** 2 < 1,
    lambda z, e: 1 - abs(z[0]) ** 2 - abs(z[1]) ** 2,
)
_ETA_BOTH = DomainConstraint("eta1 != 0 and eta2 != 0", lambda z, e: abs(e[0]) > 0 and abs(e[1]) > 0)


def _hartogs_beta(z, e):
    d = abs(z[0]) ** 2 - abs(z[1]) ** 2
    beta = (z[1] * e[0] - z[0] * e[1]) / d
    alpha2 = abs(e[0]) ** 2 / (1 - abs(z[0]) ** 2) ** 2 + abs(beta) ** 2
    return abs(beta), np.sqrt(alpha2)


_BETA_NONZERO = DomainConstraint(
    "beta(z, eta) != 0 (|beta| > 1e-8 alpha)",
    lambda z, e: (lambda b, a: b > 1e-8 * a)(*_hartogs_beta(z, e)),
    lambda z, e: (lambda b, a: b / a)(*_hartogs_beta(z, e)),
)

# -- built-in sources --------------------------------------------------------

# name -> (sigma, extra domain constraints, exp(2 sigma) written without exp/log)
# The explicit conformal factor avoids exp(2 log D), whose high-order jet
# coefficients grow like D^-order and cancel near the domain boundary.
SIGMA_PRESETS = {
    "const": ("0", (), None),
    "hartogs-log": ("log(1/((1 - abs2(z1))*(abs2(z1) - abs2(z2))))", (_HARTOGS,),
                    "((1 - abs2(z1))*(abs2(z1) - abs2(z2)))^-2"),
    "disk-log": ("log(1 - abs2(z1) - abs2(z2))", (_BALL,), "(1 - abs2(z1) - abs2(z2))^2"),
    "harmonic": ("re(z1*z2)", (), None),
}

_HARTOGS_LETS = """\
let d = abs2(z1) - abs2(z2)
let b = (z2*e1 - z1*e2)/d
let a2 = abs2(e1)/(1 - abs2(z1))^2 + abs2(b)
"""

_SOURCES = {
    "euclidean": "L = e1*conj(e1) + e2*conj(e2)\n",
    "hartogs-hermitian": _HARTOGS_LETS + "L = a2\n",
    "hartogs-randers": _HARTOGS_LETS + "L = (sqrt(a2) + sqrt(abs2(b)))^2\n",
    "hartogs-kropina": _HARTOGS_LETS + "L = a2^2/abs2(b)\n",
}

_DESCRIPTIONS = {
    "euclidean": "flat Hermitian metric |e1|^2 + |e2|^2",
    "antonelli-shimada": "exp(2 sigma) sqrt(|e1|^4 + |e2|^4) with real potential sigma(z)",
    "hartogs-hermitian": "Kaehler purely Hermitian metric on the Hartogs triangle",
    "hartogs-randers": "Randers metric alpha + |beta| on the Hartogs triangle",
    "hartogs-kropina": "Kropina metric alpha^2/|beta| on the Hartogs triangle",
}

_DOMAINS = {
    "euclidean": (),
    "hartogs-hermitian": (_HARTOGS,),
    "hartogs-randers": (_HARTOGS, _BETA_NONZERO),
    "hartogs-kropina": (_HARTOGS, _BETA_NONZERO),
}

BUILTIN_NAMES = ("euclidean", "antonelli-shimada", "hartogs-hermitian",
                 "hartogs-randers", "hartogs-kropina")


def antonelli_shimada(sigma: str = "0") -> MetricSpec:
    """AS metric; ``sigma`` is a preset name or an expression in z1, z2."""
    sigma_src, extra, factor = SIGMA_PRESETS.get(sigma, (sigma, (), None))
    sigma_prog = dsl.parse(f"L = {sigma_src}\n")
    bad = dsl.free_variables(sigma_prog.body) & {"e1", "e2"}
    if bad:
        raise CFinslerError(f"sigma may depend on z1, z2 only; found {sorted(bad)}")
    if factor is None:
        source = f"let s = {sigma_src}\nL = exp(2*s)*sqrt(abs2(e1)^2 + abs2(e2)^2)\n"
    else:
        source = f"# sigma = {sigma_src}\nL = {factor}*sqrt(abs2(e1)^2 + abs2(e2)^2)\n"
    prog = dsl.parse(source)
    return MetricSpec(
        name="antonelli-shimada",
        source=source,
        params=(("sigma", sigma),),
        domain=(_ETA_BOTH,) + tuple(extra),
        program=prog,
        description=_DESCRIPTIONS["antonelli-shimada"],
    )


def builtin(name: str, **params) -> MetricSpec:
    if name == "antonelli-shimada":
        return antonelli_shimada(**params)
    if name not in _SOURCES:
        raise CFinslerError(f"unknown built-in metric {name!r}; choose from {', '.join(BUILTIN_NAMES)}")
    if params:
        raise CFinslerError(f"metric {name!r} takes no parameters")
    return MetricSpec(name=name, source=_SOURCES[name], domain=_DOMAINS[name],
                      program=dsl.parse(_SOURCES[name]), description=_DESCRIPTIONS[name])


def list_builtins() -> list[MetricSpec]:
    return [builtin(n) for n in BUILTIN_NAMES]


def builtin_parameters(name: str) -> dict:
    if name == "antonelli-shimada":
        return {"sigma": "expression in z1, z2 or preset " + "/".join(SIGMA_PRESETS)}
    return {}


def pulled_back(spec: MetricSpec, M) -> MetricSpec:
    """The metric in coordinates z' = M z: L'(z', eta') = L(M^-1 z', M^-1 eta')."""
    M = np.asarray(M, complex)
    if M.shape != (2, 2):
        raise CFinslerError("a linear coordinate change needs a 2x2 matrix")
    det = M[0, 0] * M[1, 1] - M[0, 1] * M[1, 0]
    if abs(det) < 1e-12 * max(1.0, float(np.max(np.abs(M)))) ** 2:
        raise CFinslerError("linear coordinate change is singular")
    Minv = np.linalg.inv(M)
    if spec.pullback is not None:
        Minv = np.asarray(spec.pullback, complex) @ Minv
    rows = tuple(tuple(complex(x) for x in r) for r in Minv)
    return replace(spec, pullback=rows)


def parse_metric(text: str, name: str = "user", domain: tuple = ()) -> MetricSpec:
    """Metric from expression-language source text."""
    return MetricSpec(name=name, source=text, domain=tuple(domain), program=dsl.parse(text))


# -- evaluation ----------------------------------------------------------------


class _JetOps:
    """Elementary functions dispatching on jets and plain complex constants."""

    @staticmethod
    def _scalar(fn_name, x):
        x = complex(x)
        if fn_name in ("sqrt", "log") and not (x.real > 0 and abs(x.imag) <= 1e-8 * abs(x)):
            raise BranchError(f"{fn_name} applied to a non-real-positive constant {x!r}")
        return getattr(cmath, fn_name)(x)

    def exp(self, x):
        return jets.exp(x) if isinstance(x, WJet) else self._scalar("exp", x)

    def log(self, x):
        return jets.log(x) if isinstance(x, WJet) else self._scalar("log", x)

    def sqrt(self, x):
        return jets.sqrt(x) if isinstance(x, WJet) else self._scalar("sqrt", x)

    def conj(self, x):
        return jets.conjugate(x) if isinstance(x, WJet) else complex(x).conjugate()

    def pow(self, x, p):
        if isinstance(x, WJet):
            return jets.power(x, p)
        x = complex(x)
        if not float(p).is_integer() and not (x.real > 0 and abs(x.imag) <= 1e-8 * abs(x)):
            raise BranchError(f"non-integer power of a non-real-positive constant {x!r}")
        return x ** p


class _NumOps:
    """Plain complex evaluation; ``conj`` acts on numeric values."""

    exp = staticmethod(cmath.exp)
    log = staticmethod(cmath.log)
    sqrt = staticmethod(cmath.sqrt)

    @staticmethod
    def conj(x):
        return complex(x).conjugate()

    @staticmethod
    def pow(x, p):
        return complex(x) ** p


_JET_OPS = _JetOps()
_NUM_OPS = _NumOps()


def _check_real_positive(value: complex, where: str):
    if abs(value.imag) > REALITY_TOL * (1 + abs(value.real)):
        raise DomainError(f"L is not real at {where}: {value!r}")
    if value.real <= 0:
        raise DomainError(f"L is not positive at {where}: {value!r}")


def eval_L_jet(spec: MetricSpec, ctx: JetContext) -> WJet:
    """Jet of L at the base point of ``ctx``; reality and positivity are checked."""
    spec.check_domain(ctx.z, ctx.eta)
    v = jets.seed(ctx)
    env = {"z1": v[0], "z2": v[1], "e1": v[2], "e2": v[3]}
    if spec.pullback is not None:
        (a, b), (c, d) = spec.pullback
        env = {"z1": a * v[0] + b * v[1], "z2": c * v[0] + d * v[1],
               "e1": a * v[2] + b * v[3], "e2": c * v[2] + d * v[3]}
    try:
        out = dsl.evaluate(spec.program, env, _JET_OPS)
    except ZeroDivisionError as exc:
        raise DomainError(f"division by zero while evaluating {spec.name}: {exc}") from exc
    if not isinstance(out, WJet):
        out = WJet.constant(complex(out), ctx.order)
    _check_real_positive(complex(out.value), f"z={ctx.z}, eta={ctx.eta}")
    return out


def eval_L(spec: MetricSpec, z, eta) -> complex:
    """Plain numeric value of L (no domain check); used by finite-difference oracles."""
    z, eta = spec.source_point(z, eta)
    env = {"z1": complex(z[0]), "z2": complex(z[1]), "e1": complex(eta[0]), "e2": complex(eta[1])}
    return complex(dsl.evaluate(spec.program, env, _NUM_OPS))


# -- homogeneity ---------------------------------------------------------------


def validate_homogeneity(spec: MetricSpec, z, eta, trials: int = 5, seed: int = 0,
                         order: int = 3) -> dict:
    """Residuals of the Euler identities and of F(z, c eta) = |c| F(z, eta)."""
    ctx = JetContext(tuple(z), tuple(eta), order)
    Lj = eval_L_jet(spec, ctx)
    v = jets.seed(ctx)
    e = WJet.stack(v[2:4])
    eb = WJet.stack(v[6:8])
    Lval = complex(Lj.value)
    dL = Lj.grad(jets.ETA)
    euler_L = jets.einsum("k,k->", dL, e) - Lj.truncate(dL.order)
    g = dL.grad(jets.ETABAR)
    dg = g.grad(jets.ETA)
    euler_g = jets.einsum("ijk,k->ij", dg, e)
    recon = jets.einsum("ij,i,j->", g, e, eb) - Lj.truncate(g.order)
    scale = max(1.0, abs(Lval))
    gscale = max(1.0, float(np.max(np.abs(g.value))))

    rng = np.random.default_rng(seed)
    F0 = np.sqrt(abs(Lval))
    worst = 0.0
    for _ in range(trials):
        lam = complex(*rng.normal(size=2))
        while abs(lam) < 1e-3:
            lam = complex(*rng.normal(size=2))
        Ls = eval_L(spec, z, [lam * complex(x) for x in eta])
        worst = max(worst, abs(np.sqrt(abs(Ls)) - abs(lam) * F0) / max(1.0, abs(lam) * F0))
        worst = max(worst, abs(Ls.imag) / max(1.0, abs(Ls)))
    return {
        "euler_L": float(abs(euler_L.value)) / scale,
        "euler_g": float(np.max(np.abs(euler_g.value))) / gscale,
        "L_from_g": float(abs(recon.value)) / scale,
        "scaling": float(worst),
    }
