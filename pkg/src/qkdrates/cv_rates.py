"""Coherent-state, homodyne-detection CV-QKD with Gaussian modulation.

Reverse reconciliation, uncalibrated-device convention: the detector
efficiency and electronic noise are folded into the channel as extra loss
and noise referred to the input.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .mathcore import thermal_entropy_g
from .optimize import maximize_log
from .result import RateResult

V_MAX = 1e4
DISCRIMINANT_TOL = 1e-9


@dataclass(frozen=True)
class CvState:
    """Modulation variance v = v_A + 1 (SNU), channel transmittance t, detector
    efficiency eta, excess noise epsilon and electronic noise v_el (both SNU),
    reconciliation efficiency beta, and the effective pulse rate nu_eff.
    """

    v: float
    t: float
    eta: float = 1.0
    epsilon: float = 0.0
    v_el: float = 0.0
    beta: float = 1.0
    nu_eff: float = 1.0

    def __post_init__(self):
        if self.v < 1.0:
            raise ValueError("modulation variance v must be >= 1 (shot-noise units)")
        if not 0.0 < self.t <= 1.0 or not 0.0 < self.eta <= 1.0:
            raise ValueError("t and eta must lie in (0, 1]")
        if self.epsilon < 0.0 or self.v_el < 0.0:
            raise ValueError("noise terms must be non-negative")
        if not 0.0 < self.beta <= 1.0:
            raise ValueError("beta must lie in (0, 1]")

    @property
    def t_eta(self) -> float:
        return self.t * self.eta

    def with_v(self, v: float) -> "CvState":
        return replace(self, v=v)


def homodyne_noise(cs: CvState) -> float:
    """Detector noise delta_h = (1 + v_el)/eta - 1."""
    return (1.0 + cs.v_el) / cs.eta - 1.0


def total_noise(cs: CvState) -> float:
    """Total input-referred noise: loss + detection + excess."""
    return (1.0 - cs.t) / cs.t + homodyne_noise(cs) / cs.t + cs.epsilon


def mutual_info_ab(cs: CvState) -> float:
    """I(A:B) = (1/2) log2[(delta + v)/(delta + 1)]."""
    d = total_noise(cs)
    return 0.5 * math.log2((d + cs.v) / (d + 1.0))


def cond_variance_b_given_a(cs: CvState) -> float:
    """Lowest conditional variance v_{B|A} = t eta (delta + 1/v)."""
    return cs.t_eta * (total_noise(cs) + 1.0 / cs.v)


def cond_variance_b_given_am(cs: CvState) -> float:
    """Bob's variance given Alice's heterodyne data, v_{B|A_M} = t eta (delta + 1)."""
    return cs.t_eta * (total_noise(cs) + 1.0)


def eve_variance_bound(cs: CvState) -> float:
    """Lower bound on Eve's uncertainty on Bob, v_{B|E} >= 1/v_{B|A}."""
    return 1.0 / cond_variance_b_given_a(cs)


def rate_cv_individual(cs: CvState) -> RateResult:
    """Rate against individual (Gaussian) attacks, reverse reconciliation."""
    te = cs.t_eta
    d = total_noise(cs)
    r = 0.5 * math.log2(1.0 / (te * te * (d + 1.0 / cs.v) * (d + 1.0)))
    I_AB = mutual_info_ab(cs)
    return RateResult.from_fraction(cs.nu_eff, 0.0, I_AB - r, r)


def cv_covariance(cs: CvState) -> np.ndarray:
    """Covariance matrix of modes A, B in (x_A, p_A, x_B, p_B) ordering."""
    te = cs.t_eta
    v = cs.v
    b = te * (v + total_noise(cs))
    c = math.sqrt(te * (v * v - 1.0))
    return np.array([[v, 0.0, c, 0.0],
                     [0.0, v, 0.0, -c],
                     [c, 0.0, b, 0.0],
                     [0.0, -c, 0.0, b]])


def quadrature_blocks(gamma: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """The x and p 2x2 blocks (A, B) of a mode-ordered covariance matrix."""
    x = gamma[np.ix_([0, 2], [0, 2])]
    p = gamma[np.ix_([1, 3], [1, 3])]
    return x, p


def symplectic_eigenvalues(gamma: np.ndarray) -> np.ndarray:
    """Symplectic spectrum of a 2n x 2n mode-ordered covariance matrix
    (sorted ascending).

    Uses the Hermitian matrix i gamma^(1/2) Omega gamma^(1/2), which has the
    same spectrum as i Omega gamma but can be diagonalized with eigvalsh.
    """
    n = gamma.shape[0] // 2
    omega = np.kron(np.eye(n), np.array([[0.0, 1.0], [-1.0, 0.0]]))
    w, u = np.linalg.eigh(gamma)
    root = (u * np.sqrt(np.clip(w, 0.0, None))) @ u.T
    ev = np.linalg.eigvalsh(1j * root @ omega @ root)
    return np.sort(np.abs(ev))[::2]


def holevo_lambdas(cs: CvState) -> tuple[float, float, float]:
    """Closed-form symplectic eigenvalues (lambda_1, lambda_2, lambda_3).

    lambda_1,2 belong to gamma_AB; lambda_3 to Alice's mode conditioned on
    Bob's homodyne outcome.
    """
    te = cs.t_eta
    v = cs.v
    d = total_noise(cs)
    A = v * v * (1.0 - 2.0 * te) + 2.0 * te + (te * (v + d)) ** 2
    B = (te * (v * d + 1.0)) ** 2
    disc = A * A - 4.0 * B
    if disc < -DISCRIMINANT_TOL * max(1.0, A * A):
        raise ValueError(f"non-physical state: discriminant {disc!r} < 0")
    root = math.sqrt(max(disc, 0.0))
    l1 = math.sqrt(0.5 * (A + root))
    # lambda_1 lambda_2 = sqrt(B); avoids the cancellation in (A - root) / 2
    l2 = math.sqrt(B) / l1
    l3 = math.sqrt(v * (1.0 + v * d) / (v + d))
    return l1, l2, l3


def _g_of_lambda(lam: float) -> float:
    # lambda < 1 only through rounding at the pure-state boundary
    return thermal_entropy_g(max((lam - 1.0) / 2.0, 0.0))


def holevo_be_collective(cs: CvState) -> float:
    """Holevo information chi(B:E) of Eve on Bob's data (collective attacks)."""
    l1, l2, l3 = holevo_lambdas(cs)
    return _g_of_lambda(l1) + _g_of_lambda(l2) - _g_of_lambda(l3)


def rate_cv_collective(cs: CvState) -> RateResult:
    """K = R[beta I(A:B) - chi(B:E)] with R = nu_eff (always a homodyne signal)."""
    I_AB = mutual_info_ab(cs)
    chi = holevo_be_collective(cs)
    r = cs.beta * I_AB - chi
    return RateResult.from_fraction(cs.nu_eff, 0.0, chi, r)


def optimize_v(cs: CvState, rate_fn=rate_cv_collective, v_max: float = V_MAX) -> RateResult:
    """Maximize a CV rate over the modulation variance on [1, v_max].

    The search variable is v - 1 on a log scale, so v -> 1 is reachable.
    """

    def at(vm: float) -> RateResult:
        return rate_fn(cs.with_v(1.0 + vm))

    best = maximize_log(lambda vm: at(vm).raw_rate, 1e-6, v_max - 1.0)
    return at(best.x).with_param(1.0 + best.x)
