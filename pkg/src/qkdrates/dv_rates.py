"""Secret key rates of BB84 implementations and the SARG04 error mapping.

Lower bounds follow the uncalibrated-device scenario (all losses and errors
attributed to Eve). The ``*_upperbound_calibrated`` functions give upper
bounds in which Eve cannot touch Bob's detector efficiency or dark counts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .channel import LinkParams, expected_dv_stats, expected_eb_stats, ExpectedStats
from .mathcore import binary_entropy
from .optimize import bisect_root, maximize_log
from .result import RateResult
from .sources import POISSONIAN, PhotonStatistics

MU_LO = 1e-6
MU_HI = 1.0

# single-photon critical error rate of SARG04 from the numerical optimum of I_E,1
SARG04_CRITICAL_EPS1 = 0.1167


@dataclass(frozen=True)
class EcModel:
    """Error-correction leakage leak_EC(Q) = f_EC * h(Q)."""

    f_EC: float = 1.0

    def __post_init__(self):
        if self.f_EC < 1.0:
            raise ValueError("f_EC must be >= 1 (Shannon limit)")

    def leak(self, Q: float) -> float:
        return self.f_EC * binary_entropy(min(max(Q, 0.0), 1.0))


def _h_clip(x: float) -> float:
    return binary_entropy(min(max(x, 0.0), 0.5))


def _secure_part(Y1: float, eps1: float) -> float:
    """Y1 [1 - h(eps1)], continued below the feasibility boundary.

    For eps1 >= 1/2 the bracket is 0; for Y1 <= 0 it returns Y1 itself so the
    optimizers keep a slope pointing back into the feasible region.
    """
    if Y1 <= 0.0:
        return Y1
    return Y1 * (1.0 - _h_clip(eps1))


def _feasible(Y1: float, eps1: float) -> bool:
    return Y1 > 0.0 and 0.0 <= eps1 <= 0.5


def rate_bb84_single_photon(stats: ExpectedStats, ec: EcModel) -> RateResult:
    """Perfect single-photon source: K = R[1 - h(Q) - leak_EC(Q)]."""
    Q = stats.Q
    I_E = _h_clip(Q)
    r = _secure_part(1.0, Q) - ec.leak(Q)
    return RateResult.from_fraction(stats.R, Q, I_E, r, feasible=Q <= 0.5)


def rate_bb84_wcp_nodecoy(ps: PhotonStatistics, lp: LinkParams,
                          ec: EcModel) -> RateResult:
    """Weak coherent pulses without decoy states (PNS-limited)."""
    stats = expected_dv_stats(ps, lp)
    Q = stats.Q
    Y1 = 1.0 - stats.p_multi / stats.detection_probability
    eps1 = Q / Y1 if Y1 > 0.0 else math.inf
    secure = _secure_part(Y1, eps1)
    r = secure - ec.leak(Q)
    return RateResult.from_fraction(stats.R, Q, 1.0 - secure, r,
                                    feasible=_feasible(Y1, eps1))


def rate_bb84_decoy(ps: PhotonStatistics, lp: LinkParams, ec: EcModel) -> RateResult:
    """Decoy-state BB84 with exact parameter estimation."""
    stats = expected_dv_stats(ps, lp)
    Q = stats.Q
    secure = stats.Y0 + _secure_part(stats.Y1, stats.eps1)
    r = secure - ec.leak(Q)
    return RateResult.from_fraction(stats.R, Q, 1.0 - secure, r,
                                    feasible=_feasible(stats.Y1, stats.eps1))


def rate_bb84_eb(stats: ExpectedStats, zeta: float, ec: EcModel) -> RateResult:
    """Entanglement-based BB84, source on Alice's side.

    A fraction zeta of multi-pair events is treated as PNS-like (full
    information to Eve); the remaining events behave as single pairs.
    """
    if not 0.0 <= zeta <= 1.0:
        raise ValueError("zeta must lie in [0, 1]")
    Q = stats.Q
    Ym = stats.p_multi * zeta / stats.detection_probability
    Y1 = 1.0 - Ym
    eps1 = Q / Y1 if Y1 > 0.0 else math.inf
    secure = _secure_part(Y1, eps1)
    r = secure - ec.leak(Q)
    return RateResult.from_fraction(stats.R, Q, 1.0 - secure, r,
                                    feasible=_feasible(Y1, eps1))


def rate_bb84_eb_uncharacterized(stats: ExpectedStats, ec: EcModel) -> RateResult:
    """EB bound for a source under Eve's control: K = R[1 - h(Q) - leak_EC(Q)]."""
    Q = stats.Q
    r = 1.0 - _h_clip(Q) - ec.leak(Q)
    return RateResult.from_fraction(stats.R, Q, _h_clip(Q), r, feasible=Q <= 0.5)


def calibrated_photon_yield(stats: ExpectedStats, p_d: float) -> float:
    """Fraction Y of detections due to photons, Y = (1 - 2p_d nu/R)/(1 - 2p_d)."""
    return (1.0 - 2.0 * p_d / stats.detection_probability) / (1.0 - 2.0 * p_d)


def rate_bb84_upperbound_calibrated(ps: PhotonStatistics, lp: LinkParams, ec: EcModel,
                                    decoy: bool) -> RateResult:
    """Upper bound with calibrated detectors: dark counts and detector losses
    are not attributed to Eve. Eve still forwards at most one photon.
    """
    stats = expected_dv_stats(ps, lp)
    Q = stats.Q
    Y = calibrated_photon_yield(stats, lp.p_d)
    delta = (1.0 - Y) / 2.0
    if decoy:
        Y1 = stats.Y1
        eps1 = (Q - delta) / Y
    else:
        Y1 = Y - lp.t_B * lp.eta * stats.p_multi / stats.detection_probability
        eps1 = (Q - delta) / Y1 if Y1 > 0.0 else math.inf
    secure = _secure_part(Y1, eps1) + 2.0 * delta
    r = secure - ec.leak(Q)
    return RateResult.from_fraction(stats.R, Q, Y - _secure_part(Y1, eps1), r,
                                    feasible=_feasible(Y1, eps1))


def optimize_mu(rate_fn, lp: LinkParams, ec: EcModel, lo: float = MU_LO,
                hi: float = MU_HI, **kwargs) -> RateResult:
    """Maximize a Poissonian-source rate function over the intensity mu."""

    def at(mu: float) -> RateResult:
        return rate_fn(PhotonStatistics(POISSONIAN, mu), lp, ec, **kwargs)

    best = maximize_log(lambda mu: at(mu).raw_rate, lo, hi)
    return at(best.x).with_param(best.x)


def sarg_error_map(eps_tilde: float) -> float:
    """Channel perturbation eps~ -> SARG04 error eps = eps~/(1/2 + eps~)."""
    if not 0.0 <= eps_tilde <= 0.5:
        raise ValueError("eps_tilde must lie in [0, 1/2]")
    return eps_tilde / (0.5 + eps_tilde)


def sarg_error_unmap(eps: float) -> float:
    """Inverse of :func:`sarg_error_map`: eps~ = eps / (2(1 - eps))."""
    if not 0.0 <= eps <= 0.5:
        raise ValueError("eps must lie in [0, 1/2]")
    return eps / (2.0 * (1.0 - eps))


def critical_visibility_bb84(eps1_crit: float | None = None) -> float:
    """V at which eps~ = (1-V)/2 reaches the BB84 critical error (V ~ 78%)."""
    if eps1_crit is None:
        eps1_crit = critical_qber_bb84()
    return 1.0 - 2.0 * eps1_crit


def critical_visibility_sarg04(eps1_crit: float = SARG04_CRITICAL_EPS1) -> float:
    """V at which SARG04's mapped error reaches its critical value (V ~ 87%)."""
    return 1.0 - 2.0 * sarg_error_unmap(eps1_crit)


def critical_qber_bb84(f_EC: float = 1.0) -> float:
    """Root of 1 - h(Q) - f_EC h(Q) (11% for perfect error correction)."""
    return bisect_root(lambda q: 1.0 - (1.0 + f_EC) * binary_entropy(q), 0.01, 0.5)


def csiszar_korner_rate(I_AB: float, I_E: float) -> float:
    """Secret fraction max(I(A:B) - I_E, 0) for one-way post-processing."""
    return max(I_AB - I_E, 0.0)


def intercept_resend(p: float) -> tuple[float, float]:
    """(Q, I_E) when Eve intercept-resends a fraction p of the photons."""
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    return p / 4.0, p / 2.0


def critical_qber_intercept_resend() -> float:
    """Root of 1 - h(Q) - 2Q: the QBER above which partial intercept-resend
    leaves no Csiszar-Korner key (about 17%).
    """
    return bisect_root(lambda q: 1.0 - binary_entropy(q) - 2.0 * q, 0.01, 0.25)


def mu_opt_nodecoy_estimate(Q: float, tau: float) -> float:
    """Small-mu estimate mu_opt ~ tau F(Q)/(1 - h(2Q)), F = 1 - h(2Q) - h(Q)."""
    h2q = binary_entropy(min(2.0 * Q, 1.0))
    return tau * (1.0 - h2q - binary_entropy(Q)) / (1.0 - h2q)


def mu_opt_decoy_estimate(Q: float) -> float:
    """Small-Q estimate mu_opt ~ (1/2)[1 - h(Q)/(1 - h(Q))]."""
    hq = binary_entropy(Q)
    return 0.5 * (1.0 - hq / (1.0 - hq))
