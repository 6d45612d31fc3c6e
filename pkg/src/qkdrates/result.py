from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional


@dataclass(frozen=True)
class RateResult:
    """Outcome of a key-rate evaluation.

    ``r`` is the unclamped secret fraction (may be negative); ``K`` is the
    secret key rate R*r clamped at zero. ``param_opt`` holds the optimized
    source parameter (mu, mu', v, ...) when an optimizer produced the result.
    """

    R: float
    Q: float
    I_E: float
    r: float
    K: float
    feasible: bool
    param_opt: Optional[float] = None
    valid: bool = True

    @classmethod
    def from_fraction(cls, R: float, Q: float, I_E: float, r: float,
                      feasible: bool = True) -> "RateResult":
        feasible = feasible and r > 0.0
        K = R * r if feasible else 0.0
        return cls(R=R, Q=Q, I_E=I_E, r=r, K=K, feasible=feasible)

    @property
    def raw_rate(self) -> float:
        """R*r without clamping; the quantity the optimizers maximize."""
        return self.R * self.r

    @property
    def mu_opt(self) -> Optional[float]:
        return self.param_opt

    def with_param(self, value: float) -> "RateResult":
        return replace(self, param_opt=value)

    def invalid(self) -> "RateResult":
        """Mark the point as outside the validity domain of its bound."""
        return replace(self, valid=False)
