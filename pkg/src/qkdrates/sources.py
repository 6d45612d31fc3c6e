"""Photon-number statistics of the compared sources and repetition-rate limits."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator

from .mathcore import SERIES_CUTOFF, poisson_p

SINGLE_PHOTON = "single_photon"
POISSONIAN = "poissonian"
HERALDED_PAIR_CW = "heralded_pair_cw"
HERALDED_PAIR_PULSED = "heralded_pair_pulsed"
KINDS = (SINGLE_PHOTON, POISSONIAN, HERALDED_PAIR_CW, HERALDED_PAIR_PULSED)

# pulsed SPDC statistics p(1)~mu, p(2)~3/4 mu^2 only hold for mu << 1
PULSED_PAIR_MU_MAX = 0.2


@dataclass(frozen=True)
class PhotonStatistics:
    """Photon-number distribution p_A(n) of a source.

    ``mu`` is the mean photon number per pulse for pulsed sources. For
    ``heralded_pair_cw`` it is the pair-generation rate mu' (1/s) and
    ``delta_t`` the coincidence window (s); only their product enters.
    """

    kind: str
    mu: float = 0.0
    delta_t: float = 0.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown source kind {self.kind!r}")
        if self.mu < 0.0:
            raise ValueError("mean photon number must be non-negative")
        if self.kind == HERALDED_PAIR_CW:
            if self.delta_t <= 0.0:
                raise ValueError("heralded_pair_cw needs a positive coincidence window")
            if self.mu * self.delta_t >= 1.0:
                raise ValueError("heralded_pair_cw requires mu' * delta_t < 1")
        if self.kind == HERALDED_PAIR_PULSED and self.mu > PULSED_PAIR_MU_MAX:
            raise ValueError(
                f"pulsed pair statistics only valid for mu <= {PULSED_PAIR_MU_MAX}")

    @classmethod
    def single_photon(cls) -> "PhotonStatistics":
        return cls(SINGLE_PHOTON)

    @classmethod
    def poissonian(cls, mu: float) -> "PhotonStatistics":
        return cls(POISSONIAN, mu)

    @classmethod
    def heralded_pair_cw(cls, mu_prime: float, delta_t: float) -> "PhotonStatistics":
        return cls(HERALDED_PAIR_CW, mu_prime, delta_t)

    @classmethod
    def heralded_pair_pulsed(cls, mu: float) -> "PhotonStatistics":
        return cls(HERALDED_PAIR_PULSED, mu)

    @property
    def pairs_per_window(self) -> float:
        """mu' * delta_t for cw pair sources, 0 otherwise."""
        if self.kind == HERALDED_PAIR_CW:
            return self.mu * self.delta_t
        return 0.0

    def pmf(self, n: int) -> float:
        if n < 0:
            return 0.0
        if self.kind == POISSONIAN:
            return poisson_p(n, self.mu)
        return self._finite().get(n, 0.0)

    def _finite(self) -> dict[int, float]:
        if self.kind == SINGLE_PHOTON:
            return {1: 1.0}
        if self.kind == HERALDED_PAIR_CW:
            x = self.pairs_per_window
            return {1: 1.0 - x, 2: x}
        mu = self.mu
        p2 = 0.75 * mu * mu
        return {0: 1.0 - mu - p2, 1: mu, 2: p2}

    def terms(self) -> Iterator[tuple[int, float]]:
        """Yield (n, p_A(n)) for every n with non-negligible weight."""
        if self.kind != POISSONIAN:
            yield from sorted(self._finite().items())
            return
        mu = self.mu
        p = math.exp(-mu)
        n = 0
        acc = 0.0
        while True:
            yield n, p
            acc += p
            n += 1
            p *= mu / n
            if n > mu and p < SERIES_CUTOFF * acc:
                return

    def p_vac(self) -> float:
        return self.pmf(0)

    def p_single(self) -> float:
        return self.pmf(1)

    def p_multi(self) -> float:
        """p_A(n >= 2)."""
        if self.kind == POISSONIAN:
            mu = self.mu
            # -expm1(-mu) - mu e^{-mu} without cancellation at small mu
            return -math.expm1(-mu) - mu * math.exp(-mu)
        return sum(p for n, p in self._finite().items() if n >= 2)


@dataclass(frozen=True)
class RepetitionLimits:
    """Hardware limits on the source repetition rate.

    A dead time or duty-cycle period of 0 means "no constraint".
    """

    nu_max: float = math.inf
    tau_d: float = 0.0
    tau_d_A: float = 0.0
    T_dc: float = 0.0
    eta_A: float = 1.0
    t_A: float = 1.0

    def __post_init__(self):
        for name in ("nu_max", "tau_d", "tau_d_A", "T_dc", "eta_A", "t_A"):
            if getattr(self, name) < 0.0:
                raise ValueError(f"RepetitionLimits.{name} must be non-negative")


def _inverse(x: float) -> float:
    return math.inf if x == 0.0 else 1.0 / x


def pulsed_repetition_rate(lim: RepetitionLimits, mu: float, t: float, t_B: float,
                           eta: float) -> float:
    """min(nu_max, 1/(tau_d mu t t_B eta), 1/T_dc) for pulsed sources."""
    return min(lim.nu_max,
               _inverse(lim.tau_d * mu * t * t_B * eta),
               _inverse(lim.T_dc))


def cw_repetition_rate(lim: RepetitionLimits, mu_prime: float, t: float, t_B: float,
                       eta: float, delta_t: float) -> float:
    """Average heralding rate of a cw pair source: the smallest of the trigger
    rate eta_A t_A mu', Alice's and Bob's dead-time limits and 1/delta_t.
    """
    return min(lim.eta_A * lim.t_A * mu_prime,
               _inverse(lim.tau_d_A),
               _inverse(lim.tau_d * t * t_B * eta),
               _inverse(delta_t))
