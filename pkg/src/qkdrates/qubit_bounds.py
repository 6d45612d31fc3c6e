"""Unconditional one-way bounds for BB84 and the six-state protocol,
computed from Bell-diagonal two-qubit states (collective attacks).

Bell-diagonal weights are ordered (Phi+, Phi-, Psi+, Psi-).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .mathcore import NORM_TOL, binary_entropy, shannon_entropy
from .optimize import bisect_root

# non-negativity slack when reconstructing lambda from measured error rates
CONSISTENCY_TOL = 1e-12
ROOT_BRACKET = (0.05, 0.2)


@dataclass(frozen=True)
class BellDiagonalState:
    lam: tuple[float, float, float, float]

    def __post_init__(self):
        lam = tuple(float(x) for x in self.lam)
        if len(lam) != 4:
            raise ValueError("a Bell-diagonal state has four weights")
        if min(lam) < 0.0:
            raise ValueError("Bell-diagonal weights must be non-negative")
        if abs(sum(lam) - 1.0) > NORM_TOL:
            raise ValueError(f"weights sum to {sum(lam)!r}, not 1")
        object.__setattr__(self, "lam", lam)

    @classmethod
    def from_error_rates(cls, eps_x: float, eps_y: float, eps_z: float) -> "BellDiagonalState":
        """Invert the error-rate map; raises if the triple is not realizable."""
        lam = lambdas_from_error_rates(eps_x, eps_y, eps_z)
        if min(lam) < -CONSISTENCY_TOL:
            raise ValueError(f"inconsistent error rates ({eps_x}, {eps_y}, {eps_z})")
        lam = np.clip(lam, 0.0, None)
        return cls(tuple(lam / lam.sum()))

    def entropy(self) -> float:
        return shannon_entropy(self.lam)


def error_rates(s: BellDiagonalState) -> tuple[float, float, float]:
    """(eps_x, eps_y, eps_z) of a Bell-diagonal state."""
    _, l2, l3, l4 = s.lam
    return l2 + l4, l2 + l3, l3 + l4


def lambdas_from_error_rates(eps_x: float, eps_y: float, eps_z: float) -> np.ndarray:
    s = eps_x + eps_y + eps_z
    return np.array([1.0 - s / 2.0,
                     (eps_x + eps_y - eps_z) / 2.0,
                     (eps_y + eps_z - eps_x) / 2.0,
                     (eps_x + eps_z - eps_y) / 2.0])


def eve_info_bell(s: BellDiagonalState) -> float:
    """Holevo information of Eve on the Z-basis bit, I_E = H(lambda) - h(eps_z)."""
    return s.entropy() - binary_entropy(error_rates(s)[2])


def eve_info_sixstate(eps_x: float, eps_y: float, eps_z: float) -> float:
    """Eve's information when all three error rates are measured."""
    BellDiagonalState.from_error_rates(eps_x, eps_y, eps_z)  # consistency check
    second = 0.0
    if eps_z < 1.0:
        arg = (1.0 - (eps_x + eps_y + eps_z) / 2.0) / (1.0 - eps_z)
        second = (1.0 - eps_z) * binary_entropy(min(max(arg, 0.0), 1.0))
    if eps_z <= 0.0:
        return second
    arg = (1.0 + (eps_x - eps_y) / eps_z) / 2.0
    return eps_z * binary_entropy(min(max(arg, 0.0), 1.0)) + second


def eve_info_bb84(eps_x: float) -> float:
    """Only eps_x, eps_z are measured; Eve's optimum is u = v = eps_x, I_E = h(eps_x)."""
    if not 0.0 <= eps_x <= 0.5:
        raise ValueError("eps_x must lie in [0, 1/2]")
    return binary_entropy(eps_x)


def bb84_constrained_state(eps_x: float, eps_z: float, u: float, v: float) -> BellDiagonalState:
    """State with given (eps_x, eps_z), parametrized by the conditional
    phase-error rates u (on lambda_1 + lambda_2) and v (on lambda_3 + lambda_4).
    """
    return BellDiagonalState(((1.0 - eps_z) * (1.0 - u), (1.0 - eps_z) * u,
                              eps_z * (1.0 - v), eps_z * v))


def phase_covariant_eps_y(Q: float) -> float:
    """eps_y forced by phase-covariant cloning when eps_x = eps_z = Q."""
    if not 0.0 <= Q <= 0.5:
        raise ValueError("Q must lie in [0, 1/2]")
    return 2.0 * Q * (1.0 - Q)


def secret_fraction_sixstate(Q: float) -> float:
    """1 - h(Q) - I_E(Q) on the depolarizing channel."""
    return 1.0 - binary_entropy(Q) - eve_info_sixstate(Q, Q, Q)


def secret_fraction_bb84(Q: float) -> float:
    return 1.0 - binary_entropy(Q) - eve_info_bb84(Q)


def critical_qber_sixstate() -> float:
    return bisect_root(secret_fraction_sixstate, *ROOT_BRACKET)


def critical_qber_bb84() -> float:
    return bisect_root(secret_fraction_bb84, *ROOT_BRACKET)
