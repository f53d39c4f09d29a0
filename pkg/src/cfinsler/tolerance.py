"""Three-valued comparisons of residuals against a pass tolerance."""

from __future__ import annotations

from dataclasses import dataclass, field

YES, NO, INDETERMINATE = "yes", "no", "indeterminate"


@dataclass(frozen=True)
class ToleranceConfig:
    pass_tol: float = 1e-8
    fail_margin: float = 10.0
    overrides: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.pass_tol > 0:
            raise ValueError("pass_tol must be positive")
        if not self.fail_margin > 1:
            raise ValueError("fail_margin must exceed 1")

    def tol(self, name: str | None = None) -> float:
        return self.overrides.get(name, self.pass_tol)

    def verdict(self, residual: float, name: str | None = None) -> str:
        """``yes`` when residual <= tol, ``no`` beyond ``fail_margin * tol``."""
        t = self.tol(name)
        if residual <= t:
            return YES
        if residual >= self.fail_margin * t:
            return NO
        return INDETERMINATE


def both(a: str, b: str) -> str:
    """Three-valued conjunction."""
    if a == NO or b == NO:
        return NO
    if a == YES and b == YES:
        return YES
    return INDETERMINATE
