"""Qubit-level Monte Carlo of BB84 with intercept-resend, depolarization and loss.

Pulses are simulated in vectorized batches, each batch from its own child of
the master ``SeedSequence``; tallies are merged in batch order, so results do
not depend on how many workers ran the batches.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.signal import convolve

from .mathcore import binary_entropy

BATCH_SIZE = 1 << 18


@dataclass(frozen=True)
class SimConfig:
    """n_pulses sent by Alice; Eve intercept-resends a fraction p_ir; the line
    then depolarizes with visibility V and transmits with probability t_total.

    pa_rate is the fraction of sifted bits charged to Eve in privacy
    amplification; None uses the simulator's own count of bits Eve knows.
    """

    n_pulses: int
    p_ir: float = 0.0
    V: float = 1.0
    t_total: float = 1.0
    seed: int = 0
    f_EC: float = 1.0
    pa_rate: Optional[float] = None
    batch_size: int = BATCH_SIZE
    workers: int = 1

    def __post_init__(self):
        if int(self.n_pulses) != self.n_pulses or self.n_pulses < 1:
            raise ValueError("n_pulses must be a positive integer")
        for name in ("p_ir", "V", "t_total"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1]")
        if self.pa_rate is not None and not 0.0 <= self.pa_rate <= 1.0:
            raise ValueError("pa_rate must lie in [0, 1]")
        if self.f_EC < 1.0:
            raise ValueError("f_EC must be >= 1")
        if self.batch_size < 1 or self.workers < 1:
            raise ValueError("batch_size and workers must be positive")


@dataclass(frozen=True)
class SimOutcome:
    n_detected: int
    n_sifted: int
    n_errors: int
    eve_hits: int
    key_bits: np.ndarray  # after privacy amplification

    @property
    def qber_hat(self) -> float:
        return self.n_errors / self.n_sifted if self.n_sifted else math.nan

    @property
    def eve_fraction(self) -> float:
        return self.eve_hits / self.n_sifted if self.n_sifted else math.nan


def _simulate_batch(n: int, cfg: SimConfig, seed: np.random.SeedSequence) -> tuple[int, int, int, int, np.ndarray]:
    rng = np.random.default_rng(seed)
    a_bit = rng.integers(0, 2, n, dtype=np.int8)
    a_basis = rng.integers(0, 2, n, dtype=np.int8)

    # Eve measures in a random basis and resends what she found
    ir = rng.random(n) < cfg.p_ir
    e_basis = rng.integers(0, 2, n, dtype=np.int8)
    e_match = e_basis == a_basis
    e_bit = np.where(e_match, a_bit, rng.integers(0, 2, n, dtype=np.int8))
    s_bit = np.where(ir, e_bit, a_bit)
    s_basis = np.where(ir, e_basis, a_basis)

    # depolarizing line: flip the carried bit within its own basis
    flip = rng.random(n) < (1.0 - cfg.V) / 2.0
    s_bit = s_bit ^ flip.astype(np.int8)

    detected = rng.random(n) < cfg.t_total
    b_basis = rng.integers(0, 2, n, dtype=np.int8)
    b_bit = np.where(b_basis == s_basis, s_bit, rng.integers(0, 2, n, dtype=np.int8))

    sifted = detected & (b_basis == a_basis)
    errors = int(np.count_nonzero(sifted & (b_bit != a_bit)))
    hits = int(np.count_nonzero(sifted & ir & e_match))
    return int(detected.sum()), int(sifted.sum()), errors, hits, a_bit[sifted]


def run_bb84(cfg: SimConfig) -> SimOutcome:
    """Simulate, sift, estimate the QBER, and distil the key (EC accounted only)."""
    sizes = [cfg.batch_size] * (cfg.n_pulses // cfg.batch_size)
    if cfg.n_pulses % cfg.batch_size:
        sizes.append(cfg.n_pulses % cfg.batch_size)
    seeds = np.random.SeedSequence(cfg.seed).spawn(len(sizes))
    jobs = list(zip(sizes, seeds))
    if cfg.workers > 1:
        with ThreadPoolExecutor(cfg.workers) as pool:
            parts = list(pool.map(lambda j: _simulate_batch(j[0], cfg, j[1]), jobs))
    else:
        parts = [_simulate_batch(n, cfg, s) for n, s in jobs]

    n_det = sum(p[0] for p in parts)
    n_sift = sum(p[1] for p in parts)
    n_err = sum(p[2] for p in parts)
    hits = sum(p[3] for p in parts)
    raw = np.concatenate([p[4] for p in parts]) if parts else np.zeros(0, np.int8)

    qber = n_err / n_sift if n_sift else 0.5
    I_E = cfg.pa_rate if cfg.pa_rate is not None else (hits / n_sift if n_sift else 1.0)
    m = final_key_length(n_sift, qber, I_E, cfg.f_EC)
    key = privacy_amplify(raw, m, cfg.seed)
    return SimOutcome(n_detected=n_det, n_sifted=n_sift, n_errors=n_err,
                      eve_hits=hits, key_bits=key)


def predicted_qber(p_ir: float, V: float) -> float:
    """Closed form for the simulated channel: p/4 + (1 - p/2)(1 - V)/2."""
    return p_ir / 4.0 + (1.0 - p_ir / 2.0) * (1.0 - V) / 2.0


def final_key_length(n_sifted: int, qber_hat: float, I_E: float, f_EC: float = 1.0) -> int:
    """floor(n [1 - f_EC h(q) - I_E]^+)."""
    frac = 1.0 - f_EC * binary_entropy(min(max(qber_hat, 0.0), 1.0)) - I_E
    return int(math.floor(n_sifted * max(frac, 0.0)))


def toeplitz_seed_bits(n_in: int, out_len: int, seed) -> np.ndarray:
    """The n_in + out_len - 1 random bits defining the Toeplitz matrix."""
    rng = np.random.default_rng(seed)
    return rng.integers(0, 2, n_in + out_len - 1, dtype=np.int64)


def privacy_amplify(key, out_len: int, seed) -> np.ndarray:
    """Hash ``key`` to ``out_len`` bits with a seeded random Toeplitz matrix over GF(2).

    T[i, j] = r[i - j + n - 1], so (T x)_i is entry i + n - 1 of the full
    convolution r * x, reduced mod 2.
    """
    x = np.asarray(key, dtype=np.int64).ravel()
    n = x.size
    if out_len < 0 or out_len > n:
        raise ValueError(f"out_len={out_len} must lie in [0, {n}]")
    if out_len == 0:
        return np.zeros(0, dtype=np.int8)
    r = toeplitz_seed_bits(n, out_len, seed)
    full = convolve(r.astype(float), x.astype(float))
    # entries are integer counts <= n; rounding removes FFT noise
    y = np.rint(full[n - 1:n - 1 + out_len]).astype(np.int64) % 2
    return y.astype(np.int8)
