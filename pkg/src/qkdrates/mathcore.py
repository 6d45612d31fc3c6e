"""Numeric kernels shared by the rate formulas: entropies, Poisson weights, loss."""

from __future__ import annotations

import math
from typing import Sequence

NORM_TOL = 1e-12
SERIES_CUTOFF = 1e-18


def xlog2x(x: float) -> float:
    """x*log2(x) with the continuous extension 0 at x = 0."""
    if x <= 0.0:
        return 0.0
    return x * math.log2(x)


def binary_entropy(p: float) -> float:
    """Binary entropy h(p) in bits."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"binary_entropy: p={p!r} outside [0, 1]")
    if p == 0.0 or p == 1.0:
        return 0.0
    return -xlog2x(p) - xlog2x(1.0 - p)


def shannon_entropy(weights: Sequence[float]) -> float:
    """Shannon entropy in bits of a normalized discrete distribution."""
    total = 0.0
    for w in weights:
        if w < 0.0:
            raise ValueError(f"shannon_entropy: negative weight {w!r}")
        total += w
    if abs(total - 1.0) > NORM_TOL:
        raise ValueError(f"shannon_entropy: weights sum to {total!r}, not 1")
    return -sum(xlog2x(w) for w in weights)


def thermal_entropy_g(x: float) -> float:
    """Entropy of a thermal state with mean photon number x:
    g(x) = (x+1) log2(x+1) - x log2(x).
    """
    if x < 0.0:
        raise ValueError(f"thermal_entropy_g: negative argument {x!r}")
    if x == 0.0:
        return 0.0
    return (x + 1.0) * math.log2(x + 1.0) - xlog2x(x)


def poisson_p(n: int, mu: float) -> float:
    """Poisson weight e^{-mu} mu^n / n!."""
    if mu < 0.0:
        raise ValueError(f"poisson_p: negative mean {mu!r}")
    if n < 0:
        return 0.0
    if mu == 0.0:
        return 1.0 if n == 0 else 0.0
    # log-space keeps large n finite
    return math.exp(-mu + n * math.log(mu) - math.lgamma(n + 1))


def poisson_tail(n_min: int, mu: float) -> float:
    """P(n >= n_min) for a Poisson variable, as 1 minus the head sum.

    Cancellation makes this inaccurate for tails below ~1e-16; use
    :func:`poisson_tail_series` there.
    """
    if n_min <= 0:
        return 1.0
    head = sum(poisson_p(k, mu) for k in range(n_min))
    return max(0.0, 1.0 - head)


def poisson_tail_series(n_min: int, mu: float) -> float:
    """P(n >= n_min) summed forward until terms drop below 1e-18."""
    if mu == 0.0:
        return 1.0 if n_min <= 0 else 0.0
    n = max(n_min, 0)
    term = poisson_p(n, mu)
    total = 0.0
    while True:
        total += term
        n += 1
        term *= mu / n
        if n > mu and term < SERIES_CUTOFF * max(total, 1e-300):
            break
    return total


def g2_zero(p1: float, p2: float) -> float:
    """Second-order correlation estimate g2(0) ~ 2 p(2) / p(1)^2."""
    if p1 <= 0.0:
        raise ValueError("g2_zero: p(1) must be positive")
    return 2.0 * p2 / (p1 * p1)


def fiber_transmittance(alpha_db_per_km: float, length_km: float) -> float:
    """Fiber transmittance 10^(-alpha*l/10)."""
    if length_km < 0.0:
        raise ValueError(f"fiber_transmittance: negative length {length_km!r}")
    if alpha_db_per_km < 0.0:
        raise ValueError(f"fiber_transmittance: negative attenuation {alpha_db_per_km!r}")
    return 10.0 ** (-alpha_db_per_km * length_km / 10.0)


def fiber_length_km(alpha_db_per_km: float, t: float) -> float:
    """Inverse of :func:`fiber_transmittance`."""
    if not 0.0 < t <= 1.0:
        raise ValueError(f"fiber_length_km: transmittance {t!r} outside (0, 1]")
    if alpha_db_per_km <= 0.0:
        raise ValueError("fiber_length_km: attenuation must be positive")
    return 10.0 * -math.log10(t) / alpha_db_per_km + 0.0  # no -0.0 at t = 1


def freespace_transmittance(d_s: float, d_r: float, D: float, alpha: float,
                            length_km: float) -> float:
    """Line-of-sight free-space link: geometric spreading times scattering.

    d_s, d_r: sender/receiver apertures (m); D: beam divergence (m per km,
    i.e. mrad); alpha: atmospheric attenuation (dB/km).
    """
    if min(d_s, d_r, D, alpha, length_km) < 0.0:
        raise ValueError("freespace_transmittance: arguments must be non-negative")
    spot = d_s + D * length_km
    if spot <= 0.0:
        raise ValueError("freespace_transmittance: zero beam diameter")
    geometric = min(1.0, (d_r / spot) ** 2)
    return geometric * 10.0 ** (-alpha * length_km / 10.0)
