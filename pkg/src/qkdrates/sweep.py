"""Comparison engine: optimized key rate per platform as a function of loss.

All rates are per source pulse (K / nu_S). The sifting conventions are
nu~ = nu_S for BB84 and CV (asymmetric basis choice) and nu~ = nu_S / 2 for
COW with no decoy sequences. The EB rate is per coincidence window.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import Callable, Optional, Sequence

from .channel import LinkParams, expected_dv_stats, expected_eb_stats
from .cv_rates import V_MAX, CvState, mutual_info_ab, rate_cv_collective, rate_cv_individual
from .dpr_rates import (COW_MU_T_MAX, DprParams, rate_cow_bs, rate_cow_twopulse,
                        rate_dps_bs)
from .dv_rates import (MU_HI, MU_LO, EcModel, rate_bb84_decoy, rate_bb84_eb,
                       rate_bb84_single_photon, rate_bb84_upperbound_calibrated,
                       rate_bb84_wcp_nodecoy)
from .mathcore import fiber_length_km, fiber_transmittance
from .optimize import MaxResult, bisect_root, maximize_log
from .presets import ParameterSet
from .repeater import RepeaterParams, rate_direct, rate_two_link
from .result import RateResult
from .sources import PhotonStatistics, RepetitionLimits, cw_repetition_rate

COW_SIFTING = 0.5
COW_MU_HI = 5.0
EB_X_LO = 1e-7
EB_X_MAX = 0.5


def _dv_link(ps: ParameterSet, t: float, V: float, nu_eff: float = 1.0) -> LinkParams:
    d = ps.dv
    return LinkParams(t=t, t_B=d.t_B, eta=d.eta, p_d=d.p_d, V=V, nu_eff=nu_eff)


def _ec(ps: ParameterSet) -> EcModel:
    return EcModel(ps.dv.f_EC)


def k_single_photon(ps: ParameterSet, t: float) -> RateResult:
    stats = expected_dv_stats(PhotonStatistics.single_photon(), _dv_link(ps, t, ps.dv.V_pm))
    return rate_bb84_single_photon(stats, _ec(ps))


@dataclass(frozen=True)
class Objective:
    """One-parameter family of rates: at(x) for x in [lo, hi], searched in log x.

    to_param maps the search variable to the reported source parameter.
    """

    at: Callable[[float], RateResult]
    lo: float
    hi: float
    to_param: Callable[[float], float] = lambda x: x


def _mu_objective(rate_fn, lp: LinkParams, ec: EcModel, **kw) -> Objective:
    return Objective(lambda mu: rate_fn(PhotonStatistics.poissonian(mu), lp, ec, **kw),
                     MU_LO, MU_HI)


def eb_rate_at(ps: ParameterSet, t: float, x: float,
               limits: RepetitionLimits = RepetitionLimits()) -> RateResult:
    """EB rate for x = mu' * delta_t pairs per coincidence window."""
    dt = ps.eb_window_s
    mu_prime = x / dt
    nu = cw_repetition_rate(limits, mu_prime, t, ps.dv.t_B, ps.dv.eta, dt)
    lp = _dv_link(ps, t, ps.dv.V_eb, nu_eff=nu * dt)
    stats = expected_eb_stats(PhotonStatistics.heralded_pair_cw(mu_prime, dt), lp)
    return rate_bb84_eb(stats, ps.dv.zeta, _ec(ps))


def _cv_state(ps: ParameterSet, t: float) -> CvState:
    c = ps.cv
    return CvState(v=1.0, t=t, eta=c.eta, epsilon=c.epsilon, v_el=c.v_el, beta=c.beta)


def cv_individual_rate(state: CvState) -> RateResult:
    """Individual attacks, charged the same reconciliation inefficiency:
    beta I(A:B) - I(B:E) = r - (1 - beta) I(A:B).
    """
    res = rate_cv_individual(state)
    r = res.r - (1.0 - state.beta) * mutual_info_ab(state)
    return RateResult.from_fraction(res.R, 0.0, res.I_E, r)


def _cv_objective(ps: ParameterSet, t: float, rate_fn) -> Objective:
    # search v - 1 so that v -> 1 stays reachable on a log scale
    cs = _cv_state(ps, t)
    return Objective(lambda vm: rate_fn(cs.with_v(1.0 + vm)), 1e-6, V_MAX - 1.0,
                     to_param=lambda vm: 1.0 + vm)


def _cow_objective(ps: ParameterSet, t: float, regime: str) -> Objective:
    lp = _dv_link(ps, t, ps.dv.V_pm, nu_eff=COW_SIFTING)
    ec = _ec(ps)
    hi = COW_MU_HI
    if regime == "clip":
        hi = min(hi, COW_MU_T_MAX / t)
    base = DprParams(mu=0.0, tau=lp.tau, V=ps.dv.V_pm, eps=ps.dv.eps_cow,
                     nu_S=lp.nu_eff, p_d=lp.p_d)
    return Objective(lambda mu: rate_cow_twopulse(replace(base, mu=mu), lp, ec), MU_LO, hi)


def _bs_objective(ps: ParameterSet, t: float, rate_fn) -> Objective:
    tau = t * ps.dv.t_B * ps.dv.eta
    return Objective(lambda mu: rate_fn(DprParams(mu=mu, tau=tau)), MU_LO, COW_MU_HI)


def objective(protocol: str, ps: ParameterSet, t: float) -> Optional[Objective]:
    """The optimization problem behind a protocol's curve (None for 1ph)."""
    lp = lambda: _dv_link(ps, t, ps.dv.V_pm)
    table = {
        "wcp": lambda: _mu_objective(rate_bb84_wcp_nodecoy, lp(), _ec(ps)),
        "decoy": lambda: _mu_objective(rate_bb84_decoy, lp(), _ec(ps)),
        "wcp_upper": lambda: _mu_objective(rate_bb84_upperbound_calibrated, lp(), _ec(ps),
                                           decoy=False),
        "decoy_upper": lambda: _mu_objective(rate_bb84_upperbound_calibrated, lp(), _ec(ps),
                                             decoy=True),
        "eb": lambda: Objective(lambda x: eb_rate_at(ps, t, x), EB_X_LO, EB_X_MAX),
        "cv": lambda: _cv_objective(ps, t, rate_cv_collective),
        "cv_individual": lambda: _cv_objective(ps, t, cv_individual_rate),
        "cow": lambda: _cow_objective(ps, t, "clip"),
        "cow_drop": lambda: _cow_objective(ps, t, "drop"),
        "dps_bs": lambda: _bs_objective(ps, t, rate_dps_bs),
        "cow_bs": lambda: _bs_objective(ps, t, rate_cow_bs),
    }
    if protocol == "1ph":
        return None
    if protocol not in table:
        raise ValueError(f"unknown protocol {protocol!r}; choose from {sorted(PROTOCOLS)}")
    return table[protocol]()


def optimize_protocol(protocol: str, ps: ParameterSet, t: float
                      ) -> tuple[RateResult, Optional[MaxResult]]:
    """Optimized rate and the search record (grid, bracket, unimodality)."""
    obj = objective(protocol, ps, t)
    if obj is None:
        return k_single_photon(ps, t), None
    best = maximize_log(lambda x: obj.at(x).raw_rate, obj.lo, obj.hi)
    return obj.at(best.x).with_param(obj.to_param(best.x)), best


PROTOCOLS = ("1ph", "wcp", "decoy", "eb", "cv", "cow", "cow_drop", "wcp_upper",
             "decoy_upper", "cv_individual", "dps_bs", "cow_bs")

KTALL = ("1ph", "wcp", "decoy", "eb", "cv", "cow")

FIGURES = {
    "ktall": KTALL,
    "trust": ("wcp", "wcp_upper", "decoy", "decoy_upper"),
    "trustcv": ("cv", "cv_individual"),
    "fdall": KTALL,
    "errorless": ("1ph", "wcp", "decoy", "dps_bs", "cow_bs"),
}


def evaluate(protocol: str, ps: ParameterSet, t: float) -> RateResult:
    return optimize_protocol(protocol, ps, t)[0]


@dataclass(frozen=True)
class SweepRow:
    x: float
    t: float
    distance_km: float
    results: dict  # protocol -> RateResult


def _eval_point(args):
    protocols, ps, t = args
    return {p: evaluate(p, ps, t) for p in protocols}


def sweep_transmittance(ps: ParameterSet, protocols: Sequence[str], t_grid: Sequence[float],
                        workers: int = 1) -> list[SweepRow]:
    """Optimized rates on a grid of transmittances (rows kept in grid order)."""
    t_grid = [float(t) for t in t_grid]
    jobs = [(tuple(protocols), ps, t) for t in t_grid]
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            results = list(pool.map(_eval_point, jobs))
    else:
        results = [_eval_point(j) for j in jobs]
    return [SweepRow(x=t, t=t, distance_km=fiber_length_km(ps.alpha_db_per_km, t), results=res)
            for t, res in zip(t_grid, results)]


def sweep_distance(ps: ParameterSet, protocols: Sequence[str], l_grid: Sequence[float],
                   workers: int = 1) -> list[SweepRow]:
    ts = [fiber_transmittance(ps.alpha_db_per_km, l) for l in l_grid]
    rows = sweep_transmittance(ps, protocols, ts, workers)
    return [SweepRow(x=float(l), t=r.t, distance_km=float(l), results=r.results)
            for l, r in zip(l_grid, rows)]


def find_cutoff(protocol: str, ps: ParameterSet, t_lo: float = 1e-10,
                t_hi: float = 1.0, n_iter: int = 60) -> Optional[float]:
    """Transmittance below which no key is obtained (bisection in log t).

    None if the protocol still produces key at t_lo or none at t_hi.
    """
    def ok(t):
        res = evaluate(protocol, ps, t)
        return res.K > 0.0 and res.valid

    if not ok(t_hi):
        return None
    if ok(t_lo):
        return None
    f = lambda s: 1.0 if ok(math.exp(s)) else -1.0
    return math.exp(bisect_root(f, math.log(t_lo), math.log(t_hi), n_iter=n_iter))


def qmem_rows(l_grid: Sequence[float], line_a: RepeaterParams = RepeaterParams(),
              F_b: float = 0.9) -> list[dict]:
    """Direct link vs two-link repeater (lines a and b) as a function of distance."""
    line_b = replace(line_a, F=F_b)
    rows = []
    for l in l_grid:
        rows.append({"distance_km": float(l),
                     "K_direct": rate_direct(line_a.at_length(l)),
                     "K_rep_a": rate_two_link(line_a.at_length(l)).K,
                     "K_rep_b": rate_two_link(line_b.at_length(l)).K})
    return rows
