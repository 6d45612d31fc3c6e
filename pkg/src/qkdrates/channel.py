"""Expected detection and error statistics for the a-priori comparison channel.

The channel is a depolarizing channel of visibility V on top of loss, with
detector dark counts. These are the rates one would observe without Eve.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .sources import HERALDED_PAIR_CW, PhotonStatistics


def _check_probability(name: str, value: float) -> None:
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"{name}={value!r} outside [0, 1]")


@dataclass(frozen=True)
class LinkParams:
    """Channel and detection parameters.

    t: channel transmittance, t_B: Bob's internal transmittance, eta:
    detector efficiency, p_d: dark-count probability per gate, V: visibility,
    nu_eff: effective (sifted) pulse rate in Hz.
    """

    t: float
    t_B: float = 1.0
    eta: float = 1.0
    p_d: float = 0.0
    V: float = 1.0
    nu_eff: float = 1.0

    def __post_init__(self):
        for name in ("t", "t_B", "eta", "p_d", "V"):
            _check_probability(name, getattr(self, name))
        if self.nu_eff <= 0.0:
            raise ValueError("nu_eff must be positive")

    @property
    def tau(self) -> float:
        """Overall transmission t * t_B * eta."""
        return self.t * self.t_B * self.eta

    @property
    def eps_channel(self) -> float:
        return (1.0 - self.V) / 2.0


@dataclass(frozen=True)
class ExpectedStats:
    R: float
    Q: float
    Y0: float
    Y1: float
    eps1: float
    P_sig: float
    P_dark: float
    p_multi: float
    nu_eff: float

    @property
    def detection_probability(self) -> float:
        """R / nu_eff."""
        return self.P_sig + self.P_dark


def _click_sums(ps: PhotonStatistics, tau: float) -> tuple[float, float]:
    """Return (sum_{n>=1} p(n)[1-(1-tau)^n], sum_{n>=0} p(n)(1-tau)^n)."""
    signal = 0.0
    no_click = 0.0
    log_keep = math.log1p(-tau) if tau < 1.0 else -math.inf
    for n, p in ps.terms():
        if n == 0:
            no_click += p
            continue
        # expm1 keeps 1-(1-tau)^n accurate for tau -> 0
        lost = -math.expm1(n * log_keep) if tau < 1.0 else 1.0
        no_click += p * (1.0 - lost)
        signal += p * lost
    return signal, no_click


def _stats(ps: PhotonStatistics, lp: LinkParams, eps: float) -> ExpectedStats:
    P, no_click = _click_sums(ps, lp.tau)
    P_d = 2.0 * lp.p_d * no_click
    total = P + P_d
    if total <= 0.0:
        raise ValueError("no detections: source emits nothing and p_d = 0")
    R = lp.nu_eff * total
    Q = (eps * P + P_d / 2.0) / total
    Y0 = 2.0 * lp.p_d * ps.p_vac() / total
    Y1 = ps.p_single() * lp.tau / total
    return ExpectedStats(R=R, Q=Q, Y0=Y0, Y1=Y1, eps1=Q, P_sig=P, P_dark=P_d,
                         p_multi=ps.p_multi(), nu_eff=lp.nu_eff)


def expected_dv_stats(ps: PhotonStatistics, lp: LinkParams) -> ExpectedStats:
    """Expected R, Q and decoy yields for a prepare-and-measure source."""
    return _stats(ps, lp, lp.eps_channel)


def double_pair_error(ps: PhotonStatistics) -> float:
    """Intrinsic error from double-pair events, mu' delta_t / 2."""
    return ps.pairs_per_window / 2.0


def expected_eb_stats(ps: PhotonStatistics, lp: LinkParams) -> ExpectedStats:
    """Expected statistics for a cw heralded-pair (entanglement-based) source.

    The channel error (1-V)/2 is increased by the double-pair error.
    """
    if ps.kind != HERALDED_PAIR_CW:
        raise ValueError("expected_eb_stats needs heralded_pair_cw statistics")
    return _stats(ps, lp, lp.eps_channel + double_pair_error(ps))
