"""Distributed-phase-reference protocols (DPS, COW) under restricted attacks."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .channel import LinkParams
from .dv_rates import EcModel
from .mathcore import binary_entropy
from .optimize import maximize_log
from .result import RateResult

# the two-pulse attack bound holds only for mu * t << 1
COW_MU_T_MAX = 0.1
_MU_T_SLACK = 1e-9

# Q entering leak_EC: "channel" counts dark clicks as errors of 1/2 (as for
# prepare-and-measure BB84); "bit_error" uses the bare COW bit error eps.
QBER_MODELS = ("channel", "bit_error")


@dataclass(frozen=True)
class DprParams:
    """mu: pulse intensity; tau: forwarded fraction t*t_B*eta; V: interferometer
    visibility; eps: COW bit error (independent of V); f: decoy-sequence
    fraction (COW); nu_S: pulse rate (Hz); p_d: dark-count probability.
    """

    mu: float
    tau: float
    V: float = 1.0
    eps: float = 0.0
    f: float = 0.0
    nu_S: float = 1.0
    p_d: float = 0.0

    def __post_init__(self):
        if self.mu < 0.0:
            raise ValueError("mu must be non-negative")
        if not 0.0 <= self.tau <= 1.0:
            raise ValueError("tau must lie in [0, 1]")
        if not 0.0 <= self.f < 1.0:
            raise ValueError("decoy fraction f must lie in [0, 1)")
        if not 0.0 <= self.V <= 1.0 or not 0.0 <= self.eps <= 0.5:
            raise ValueError("V must lie in [0, 1] and eps in [0, 1/2]")


def bs_overlap_gamma(mu: float, tau: float) -> float:
    """gamma = exp(-mu (1 - tau)), overlap parameter of Eve's tapped pulses."""
    return math.exp(-mu * (1.0 - tau))


def eve_info_dps_bs(gamma: float) -> float:
    return (2.0 * binary_entropy((1.0 - gamma ** 2) / 2.0)
            - binary_entropy((1.0 - gamma ** 4) / 2.0))


def eve_info_cow_bs(gamma: float) -> float:
    return binary_entropy((1.0 - gamma) / 2.0)


def rate_dps_bs(p: DprParams) -> RateResult:
    """DPS against the collective beam-splitting attack (no errors)."""
    I_E = eve_info_dps_bs(bs_overlap_gamma(p.mu, p.tau))
    R = p.nu_S * -math.expm1(-p.mu * p.tau)
    return RateResult.from_fraction(R, 0.0, I_E, 1.0 - I_E)


def rate_cow_bs(p: DprParams) -> RateResult:
    """COW against the beam-splitting attack; decoy sequences and empty
    pulses reduce the useful rate to nu_S (1 - f)/2.
    """
    I_E = eve_info_cow_bs(bs_overlap_gamma(p.mu, p.tau))
    R = p.nu_S * (1.0 - p.f) / 2.0 * -math.expm1(-p.mu * p.tau)
    return RateResult.from_fraction(R, 0.0, I_E, 1.0 - I_E)


def cow_xi(V: float) -> float:
    return 2.0 * math.sqrt(V * (1.0 - V))


def eve_info_cow_twopulse(mu: float, V: float, eps: float) -> float:
    """Eve's information for the best attack on pairs of pulses."""
    xi = cow_xi(V)
    if math.exp(-mu) <= xi:
        return 1.0
    F = (2.0 * V - 1.0) * math.exp(-mu) - xi * math.sqrt(-math.expm1(-2.0 * mu))
    return eps + (1.0 - eps) * binary_entropy(min(max((1.0 + F) / 2.0, 0.0), 1.0))


def cow_qber(mu: float, lp: LinkParams, eps: float, model: str = "channel") -> float:
    """Expected COW error: bit error on signal clicks, 1/2 on dark counts."""
    if model not in QBER_MODELS:
        raise ValueError(f"unknown qber model {model!r}")
    if model == "bit_error":
        return eps
    P = mu * lp.tau
    P_d = 2.0 * lp.p_d
    total = P + P_d
    if total <= 0.0:
        return 0.5
    return (eps * P + P_d / 2.0) / total


def rate_cow_twopulse(p: DprParams, lp: LinkParams, ec: EcModel,
                      qber_model: str = "channel") -> RateResult:
    """COW against coherent two-pulse attacks, with errors.

    R = nu_eff [mu t t_B eta + 2 p_d]. The point is flagged invalid (not
    infeasible) when mu * t exceeds the regime where the bound was derived.
    """
    I_E = eve_info_cow_twopulse(p.mu, p.V, p.eps)
    R = lp.nu_eff * (p.mu * lp.tau + 2.0 * lp.p_d)
    Q = cow_qber(p.mu, lp, p.eps, qber_model)
    r = 1.0 - I_E - ec.leak(Q)
    res = RateResult.from_fraction(R, Q, I_E, r)
    if p.mu * lp.t > COW_MU_T_MAX * (1.0 + _MU_T_SLACK):
        res = res.invalid()
    return res


def optimize_cow(lp: LinkParams, ec: EcModel, V: float, eps: float,
                 regime: str = "clip", mu_hi: float = 5.0,
                 qber_model: str = "channel") -> RateResult:
    """Optimize the COW two-pulse rate over mu.

    regime="clip" restricts the search to mu <= 0.1/t so that the reported
    point always satisfies mu t <= 0.1; regime="drop" optimizes freely and
    marks the result invalid when mu_opt t > 0.1.
    """
    if regime not in ("clip", "drop"):
        raise ValueError("regime must be 'clip' or 'drop'")
    hi = mu_hi
    if regime == "clip" and lp.t > 0.0:
        hi = min(hi, COW_MU_T_MAX / lp.t)
    base = DprParams(mu=0.0, tau=lp.tau, V=V, eps=eps, nu_S=lp.nu_eff, p_d=lp.p_d)

    def at(mu: float) -> RateResult:
        return rate_cow_twopulse(replace(base, mu=mu), lp, ec, qber_model)

    best = maximize_log(lambda mu: at(mu).raw_rate, 1e-6, hi)
    return at(best.x).with_param(best.x)
