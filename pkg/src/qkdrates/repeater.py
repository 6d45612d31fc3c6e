"""Two-link quantum repeater with multimode memories, and the cost model of a
linear chain of trusted relays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np

from .mathcore import binary_entropy, fiber_transmittance
from .optimize import bisect_root
from .result import RateResult

C_FIBER_KM_PER_S = 2.0e5


@dataclass(frozen=True)
class RepeaterParams:
    nu_S: float = 1e10
    eta: float = 0.5
    eta_M: float = 0.9
    p_M: float = 0.9
    N: int = 1000
    T_M: float = 10.0
    F: float = 0.95
    alpha: float = 0.2
    length_km: float = 500.0
    c_fiber: float = C_FIBER_KM_PER_S

    def __post_init__(self):
        for name in ("eta", "eta_M", "p_M"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1]")
        if not 0.25 <= self.F <= 1.0:
            raise ValueError("Bell-measurement fidelity F must lie in [1/4, 1]")
        if int(self.N) != self.N or self.N < 1:
            raise ValueError("N must be a positive integer")
        if self.T_M <= 0.0 or self.c_fiber <= 0.0 or self.length_km < 0.0:
            raise ValueError("T_M, c_fiber must be positive and length non-negative")

    @property
    def t(self) -> float:
        return fiber_transmittance(self.alpha, self.length_km)

    def at_length(self, length_km: float) -> "RepeaterParams":
        return replace(self, length_km=length_km)


def rate_direct(rp: RepeaterParams) -> float:
    """Direct entanglement distribution: K1 = nu_S t eta^2 (a detection is a key bit)."""
    return rp.nu_S * rp.t * rp.eta ** 2


def expected_rounds(x: float) -> float:
    """Mean number of rounds until both links have succeeded at least once,
    each with probability x per round: (1/x)(3 - 2x)/(2 - x).
    """
    if not 0.0 < x <= 1.0:
        raise ValueError("x must lie in (0, 1]")
    return (3.0 - 2.0 * x) / (x * (2.0 - x))


def sample_rounds(x: float, n_trials: int, rng: np.random.Generator) -> np.ndarray:
    """Monte Carlo of the same race: max of two independent geometric variables."""
    g = rng.geometric(x, size=(2, n_trials))
    return g.max(axis=0)


def link_success_probability(rp: RepeaterParams) -> float:
    """x = 1 - (1 - sqrt(t) eta)^N over N stored modes, accurate for small sqrt(t) eta."""
    p = math.sqrt(rp.t) * rp.eta
    if p >= 1.0:
        return 1.0
    return -math.expm1(rp.N * math.log1p(-p))


def link_time(rp: RepeaterParams) -> float:
    """Time tau = <n> l / c to establish both links (exact <n>)."""
    return expected_rounds(link_success_probability(rp)) * rp.length_km / rp.c_fiber


def link_time_approx(rp: RepeaterParams) -> float:
    """Small-x shorthand tau ~ (3/2)(l/c)/(N sqrt(t) eta)."""
    return 1.5 * (rp.length_km / rp.c_fiber) / (rp.N * math.sqrt(rp.t) * rp.eta)


def swap_error(F: float) -> float:
    """Error from a depolarized Bell measurement: two wrong Bell states out of three."""
    return 2.0 / 3.0 * (1.0 - F)


def rate_two_link(rp: RepeaterParams, approx_tau: bool = False) -> RateResult:
    """K2 = R2 [1 - 2h(eps)], R2 = (1/tau) (1/2) p_M^2 eta_M^2, sharp cut at tau >= T_M."""
    tau = link_time_approx(rp) if approx_tau else link_time(rp)
    eps = swap_error(rp.F)
    r = 1.0 - 2.0 * binary_entropy(eps)
    if rp.length_km == 0.0:
        R2 = math.inf
    else:
        R2 = 0.5 * (rp.p_M * rp.eta_M) ** 2 / tau if tau < rp.T_M else 0.0
    return RateResult.from_fraction(R2, eps, binary_entropy(eps), r,
                                    feasible=R2 > 0.0)


def fidelity_threshold() -> float:
    """F above which 1 - 2h((2/3)(1-F)) > 0 (about 83.5%)."""
    return bisect_root(lambda F: 1.0 - 2.0 * binary_entropy(swap_error(F)), 0.7, 1.0)


def crossover_length(rp: RepeaterParams, lo: float = 10.0, hi: float = 2000.0,
                     step: float = 5.0) -> Optional[float]:
    """Shortest length at which the two-link repeater overtakes direct
    distribution, or None. A scan brackets the first sign change (the
    memory cut makes the difference non-monotone), bisection refines it.
    """
    diff = lambda l: rate_two_link(rp.at_length(l)).K - rate_direct(rp.at_length(l))
    grid = np.arange(lo, hi + step, step)
    prev = grid[0]
    if diff(prev) > 0.0:
        return float(prev)
    for l in grid[1:]:
        if diff(l) > 0.0:
            return bisect_root(diff, prev, l)
        prev = l
    return None


@dataclass(frozen=True)
class NetworkSpec:
    """Linear chain over total distance L (km) with trusted nodes every l km."""

    L: float
    K_target: float
    C1: float = 1.0
    k: float = 1.0
    spacing_km: np.ndarray = field(default_factory=lambda: np.linspace(0.5, 200.0, 400))

    def __post_init__(self):
        if self.L <= 0.0 or self.K_target <= 0.0:
            raise ValueError("L and K_target must be positive")


@dataclass(frozen=True)
class CostCurve:
    spacing_km: np.ndarray
    cost: np.ndarray          # inf where K(l) = 0
    figure_of_merit: np.ndarray  # F(l) = l K(l)
    l_opt: Optional[float]

    @property
    def feasible(self) -> bool:
        return self.l_opt is not None


def network_cost(ns: NetworkSpec, K_of_l: Callable[[float], float]) -> CostCurve:
    """C_tot(l) = C1 (L/l)(K_target/K(l)); minimal cost where l K(l) is maximal.

    Relay-station cost is neglected.
    """
    l = np.asarray(ns.spacing_km, dtype=float)
    K = np.array([K_of_l(x) for x in l], dtype=float)
    fom = l * K
    with np.errstate(divide="ignore"):
        cost = np.where(K > 0.0, ns.C1 * (ns.L / l) * (ns.K_target / np.where(K > 0, K, 1.0)),
                        np.inf)
    l_opt = float(l[int(np.argmax(fom))]) if np.any(K > 0.0) else None
    return CostCurve(spacing_km=l, cost=cost, figure_of_merit=fom, l_opt=l_opt)


def power_law_rate(k: float, alpha: float = 0.2) -> Callable[[float], float]:
    """K(l) = t(l)^k, the generic loss scaling of a link."""
    return lambda l: fiber_transmittance(alpha, l) ** k


def l_opt_power_law(k: float, alpha: float = 0.2) -> float:
    """Analytic maximizer of l t^k: 10/(k alpha ln 10)."""
    return 10.0 / (k * alpha * math.log(10.0))
