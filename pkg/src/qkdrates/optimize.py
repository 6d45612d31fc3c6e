"""One-dimensional maximizers for source parameters (mu, v, ...).

Key rates are unimodal in the source parameter over the regimes of interest,
so a coarse log grid locates the bracket and golden-section search refines it.
The objective passed in should be the *unclamped* rate so that the search
still sees a slope where the clamped rate is flat at zero.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class MaxResult:
    x: float
    value: float
    unimodal: bool
    grid_x: np.ndarray
    grid_values: np.ndarray

    @property
    def bracket(self) -> tuple[float, float]:
        """Coarse-grid neighbours of the optimum (evidence of a true maximum)."""
        i = int(np.argmin(np.abs(self.grid_x - self.x)))
        lo = self.grid_x[max(i - 1, 0)]
        hi = self.grid_x[min(i + 1, len(self.grid_x) - 1)]
        return float(lo), float(hi)


def golden_section_max(f: Callable[[float], float], a: float, b: float,
                       tol: float = 1e-10, max_iter: int = 200) -> tuple[float, float]:
    """Maximize a unimodal f on [a, b]; returns (x, f(x))."""
    a, b = min(a, b), max(a, b)
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(max_iter):
        if b - a <= tol * max(1.0, abs(a) + abs(b)):
            break
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = f(d)
    if fc >= fd:
        return c, fc
    return d, fd


def _count_peaks(values: np.ndarray) -> int:
    # strict local maxima after merging plateaus
    v = values[np.concatenate(([True], np.diff(values) != 0))]
    if len(v) < 3:
        return 1
    inner = (v[1:-1] > v[:-2]) & (v[1:-1] > v[2:])
    return int(inner.sum()) + int(v[0] > v[1]) + int(v[-1] > v[-2])


def maximize_log(f: Callable[[float], float], lo: float, hi: float,
                 n_grid: int = 61, tol: float = 1e-10,
                 dense_grid: int = 4001) -> MaxResult:
    """Maximize f(x) for x in [lo, hi] (lo > 0), searching in log x.

    A coarse log grid checks unimodality and brackets the maximum; golden-section
    search in log-space then refines it. A multimodal coarse grid with a
    positive maximum triggers a warning and a dense-grid search instead.
    """
    if not 0.0 < lo < hi:
        raise ValueError("maximize_log needs 0 < lo < hi")
    g = lambda s: f(math.exp(s))
    s_grid = np.linspace(math.log(lo), math.log(hi), n_grid)
    values = np.array([g(s) for s in s_grid])
    # multimodality only matters where some key exists, so wiggles of the
    # negative (no-key) part of the objective are ignored
    unimodal = _count_peaks(np.maximum(values, 0.0)) <= 1
    if not unimodal:
        warnings.warn("objective is not unimodal on the coarse grid; "
                      "falling back to a dense grid", RuntimeWarning, stacklevel=2)
        s_grid = np.linspace(math.log(lo), math.log(hi), dense_grid)
        values = np.array([g(s) for s in s_grid])
    i = int(np.argmax(values))
    a = s_grid[max(i - 1, 0)]
    b = s_grid[min(i + 1, len(s_grid) - 1)]
    s_best, v_best = golden_section_max(g, a, b, tol=tol)
    if values[i] > v_best:
        s_best, v_best = s_grid[i], values[i]
    return MaxResult(x=math.exp(s_best), value=float(v_best), unimodal=unimodal,
                     grid_x=np.exp(s_grid), grid_values=values)


def bisect_root(f: Callable[[float], float], a: float, b: float,
                n_iter: int = 60) -> float:
    """Root of f on [a, b] by bisection; f(a) and f(b) must differ in sign."""
    fa, fb = f(a), f(b)
    if fa == 0.0:
        return a
    if fb == 0.0:
        return b
    if (fa > 0.0) == (fb > 0.0):
        raise ValueError("bisect_root: no sign change on the interval")
    for _ in range(n_iter):
        m = 0.5 * (a + b)
        fm = f(m)
        if fm == 0.0:
            return m
        if (fm > 0.0) == (fa > 0.0):
            a, fa = m, fm
        else:
            b = m
    return 0.5 * (a + b)
