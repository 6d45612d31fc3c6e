"""Command-line front end.

Exit status: 0 success, 1 usage or configuration error, 2 infeasible result.
"""

from __future__ import annotations

import argparse
import math
import sys
import warnings
from dataclasses import replace

import numpy as np

from . import csvio
from .config import ConfigError, ScenarioConfig, load_config
from .channel import ExpectedStats
from .dv_rates import EcModel, rate_bb84_single_photon
from .mathcore import fiber_transmittance
from .mc_sim import SimConfig, run_bb84
from .plotting import plot_csv
from .presets import get_preset
from .repeater import (NetworkSpec, RepeaterParams, crossover_length, fidelity_threshold,
                       l_opt_power_law, link_time, link_time_approx, network_cost,
                       power_law_rate, rate_direct, rate_two_link)
from .sweep import (FIGURES, PROTOCOLS, evaluate, optimize_protocol, qmem_rows,
                    sweep_distance, sweep_transmittance)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_INFEASIBLE = 2

CV_PROTOCOLS = ("cv", "cv_individual")
UPPER = {"wcp": "wcp_upper", "decoy": "decoy_upper"}


class _Parser(argparse.ArgumentParser):
    """argparse exits with 2 on usage errors; here 2 means 'infeasible'."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _needs(protocols) -> tuple[str, ...]:
    needs = set()
    for p in protocols:
        needs.add("homodyne" if p in CV_PROTOCOLS else "photon_counter")
    return tuple(sorted(needs))


def _scenario(args, protocols=()) -> ScenarioConfig:
    """Scenario from --config (which wins) or from the --set preset."""
    if args.config:
        cfg = load_config(args.config, needs=_needs(protocols or ("1ph",)))
    else:
        cfg = ScenarioConfig(params=get_preset(args.set))
    if getattr(args, "grid", None) is not None:
        cfg = replace(cfg, grid=args.grid)
    return cfg


def _protocol_list(args, cfg: ScenarioConfig) -> tuple[str, ...]:
    if getattr(args, "protocol", None):
        protos = tuple(p.strip() for p in args.protocol.split(",") if p.strip())
    elif getattr(args, "figure", None) in FIGURES:
        protos = FIGURES[args.figure]
    elif cfg.protocols:
        protos = cfg.protocols
    else:
        protos = FIGURES["ktall"]
    for p in protos:
        if p not in PROTOCOLS:
            raise ConfigError("protocol", f"unknown protocol {p!r}; choose from {PROTOCOLS}")
    if cfg.scenario == "calibrated_upper":
        protos = tuple(UPPER.get(p, p) for p in protos)
    return protos


def _transmittance(args, cfg: ScenarioConfig) -> float:
    if args.t is not None and args.distance_km is not None:
        raise ConfigError("t", "give either --t or --distance-km, not both")
    if args.distance_km is not None:
        if args.distance_km < 0.0:
            raise ConfigError("distance_km", "must be non-negative")
        return fiber_transmittance(cfg.params.alpha_db_per_km, args.distance_km)
    if args.t is None:
        raise ConfigError("t", "a transmittance (--t) or distance (--distance-km) is required")
    if not 0.0 < args.t <= 1.0:
        raise ConfigError("t", "must lie in (0, 1]")
    return args.t


def _print_kv(pairs) -> None:
    for k, v in pairs:
        print(f"{k}={csvio.format_cell(v)}")


def _result_pairs(res):
    return [("R", res.R), ("Q", res.Q), ("I_E", res.I_E), ("r", res.r), ("K", res.K),
            ("param_opt", res.param_opt), ("feasible", res.feasible), ("valid", res.valid)]


# --- subcommands -------------------------------------------------------------

def cmd_rate(args) -> int:
    proto = args.protocol or "1ph"
    if args.qber is not None:
        if proto != "1ph":
            raise ConfigError("qber", "--qber applies to the single-photon protocol only")
        if not 0.0 <= args.qber <= 0.5:
            raise ConfigError("qber", "must lie in [0, 1/2]")
        stats = ExpectedStats(R=1.0, Q=args.qber, Y0=0.0, Y1=1.0, eps1=args.qber,
                              P_sig=1.0, P_dark=0.0, p_multi=0.0, nu_eff=1.0)
        res = rate_bb84_single_photon(stats, EcModel(args.f_ec))
        _print_kv([("protocol", proto), ("Q", args.qber)] + _result_pairs(res)[2:])
        return EXIT_OK if res.feasible else EXIT_INFEASIBLE
    cfg = _scenario(args, (proto,))
    (proto,) = _protocol_list(argparse.Namespace(protocol=proto), cfg)
    t = _transmittance(args, cfg)
    res = evaluate(proto, cfg.params, t)
    _print_kv([("protocol", proto), ("set", cfg.params.name), ("t", t)] + _result_pairs(res))
    return EXIT_OK if res.feasible and res.valid else EXIT_INFEASIBLE


def sweep_table(protocols, rows, with_fom: bool = False):
    """Header and dict rows for a rate sweep; invalid points leave K empty."""
    header = ["t", "distance_km"]
    for p in protocols:
        if with_fom:
            header.append(f"F_{p}")
        header += [f"K_{p}", f"param_{p}", f"feasible_{p}"]
    out = []
    for row in rows:
        d = {"t": row.t, "distance_km": row.distance_km}
        for p in protocols:
            res = row.results[p]
            K = res.K if res.valid else None
            d[f"K_{p}"] = K
            d[f"param_{p}"] = res.param_opt
            d[f"feasible_{p}"] = res.feasible and res.valid
            if with_fom:
                d[f"F_{p}"] = None if K is None else row.distance_km * K
        out.append(d)
    return header, out


def cmd_sweep(args) -> int:
    figure = args.figure or "ktall"
    if figure == "qmem":
        return _sweep_qmem(args)
    cfg = _scenario(args, FIGURES.get(figure, ()) if not args.protocol else
                    tuple(args.protocol.split(",")))
    protocols = _protocol_list(args, cfg)
    grid = cfg.grid
    if figure == "fdall" or cfg.sweep == "distance":
        lo = args.x_min if args.x_min is not None else (cfg.x_min if cfg.sweep == "distance" else 1.0)
        hi = args.x_max if args.x_max is not None else (cfg.x_max if cfg.sweep == "distance" else 150.0)
        rows = sweep_distance(cfg.params, protocols, np.linspace(lo, hi, grid), args.workers)
        header, table = sweep_table(protocols, rows, with_fom=True)
    else:
        lo = args.x_min if args.x_min is not None else cfg.x_min
        hi = args.x_max if args.x_max is not None else cfg.x_max
        if not 0.0 < lo < hi <= 1.0:
            raise ConfigError("t_range", "need 0 < t_min < t_max <= 1")
        rows = sweep_transmittance(cfg.params, protocols, np.geomspace(hi, lo, grid),
                                   args.workers)
        header, table = sweep_table(protocols, rows)
    out = args.out or cfg.out_csv
    text = csvio.dumps(header, table)
    if out:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if args.svg or cfg.out_svg:
        plot_csv(header, csvio.loads(text)[1], args.svg or cfg.out_svg,
                 title=f"{figure} ({cfg.params.name})")
    return EXIT_OK


def _repeater_params(args) -> RepeaterParams:
    kw = {}
    for name in ("nu_S", "eta", "eta_M", "p_M", "N", "T_M", "F"):
        v = getattr(args, name, None)
        if v is not None:
            kw[name] = v
    try:
        return RepeaterParams(**kw)
    except ValueError as exc:
        raise ConfigError("repeater", str(exc)) from None


def _sweep_qmem(args) -> int:
    rp = _repeater_params(args)
    hi = args.x_max if args.x_max is not None else 1000.0
    lo = args.x_min if args.x_min is not None else 10.0
    grid = args.grid or 100
    rows = qmem_rows(np.linspace(lo, hi, grid), rp, F_b=args.F_b)
    header = ["distance_km", "K_direct", "K_rep_a", "K_rep_b"]
    text = csvio.dumps(header, rows)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if args.svg:
        plot_csv(header, csvio.loads(text)[1], args.svg, title="qmem", log_x=False)
    return EXIT_OK


def cmd_optimize(args) -> int:
    cfg = _scenario(args, (args.protocol,))
    (proto,) = _protocol_list(args, cfg)
    t = _transmittance(args, cfg)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        res, search = optimize_protocol(proto, cfg.params, t)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    pairs = [("protocol", proto), ("set", cfg.params.name), ("t", t)]
    if search is None:
        pairs.append(("note", "nothing to optimize"))
    else:
        lo, hi = search.bracket
        obj_lo = np.interp(np.log(lo), np.log(search.grid_x), search.grid_values)
        obj_hi = np.interp(np.log(hi), np.log(search.grid_x), search.grid_values)
        pairs += [("argmax", res.param_opt), ("bracket_lo", lo), ("bracket_hi", hi),
                  ("objective_at_bracket_lo", float(obj_lo)),
                  ("objective_at_bracket_hi", float(obj_hi)),
                  ("objective_at_max", search.value), ("unimodal", search.unimodal)]
    pairs += _result_pairs(res)
    _print_kv(pairs)
    return EXIT_OK if res.feasible and res.valid else EXIT_INFEASIBLE


def cmd_simulate(args) -> int:
    try:
        cfg = SimConfig(n_pulses=args.n, p_ir=args.p_ir, V=args.visibility,
                        t_total=args.t if args.t is not None else 1.0, seed=args.seed,
                        f_EC=args.f_ec, pa_rate=args.pa_rate, workers=args.workers)
    except ValueError as exc:
        raise ConfigError("simulate", str(exc)) from None
    out = run_bb84(cfg)
    row = {"n_pulses": cfg.n_pulses, "p_ir": cfg.p_ir, "V": cfg.V, "t_total": cfg.t_total,
           "seed": cfg.seed, "n_detected": out.n_detected, "n_sifted": out.n_sifted,
           "n_errors": out.n_errors, "qber_hat": out.qber_hat, "eve_hits": out.eve_hits,
           "eve_fraction": out.eve_fraction, "final_key_bits": int(out.key_bits.size),
           "key_hex": _bits_hex(out.key_bits)}
    header = list(row)
    if args.out:
        csvio.write_csv(args.out, header, [row])
    _print_kv([(k, row[k]) for k in header if k != "key_hex"])
    return EXIT_OK if out.key_bits.size > 0 else EXIT_INFEASIBLE


def _bits_hex(bits) -> str:
    if bits.size == 0:
        return ""
    return np.packbits(bits.astype(np.uint8)).tobytes().hex()


def cmd_plot(args) -> int:
    try:
        header, rows = csvio.read_csv(args.csv)
    except OSError as exc:
        raise ConfigError("csv", f"cannot read {args.csv}: {exc.strerror}") from None
    try:
        plotted = plot_csv(header, rows, args.out, x_col=args.x, title=args.title)
    except ValueError as exc:
        raise ConfigError("csv", str(exc)) from None
    print(f"series={len(plotted)}")
    return EXIT_OK


def cmd_network_cost(args) -> int:
    spacing = np.linspace(args.spacing_min_km, args.spacing_max_km, args.grid or 400)
    try:
        ns = NetworkSpec(L=args.L_km, K_target=args.k_target, C1=args.c1,
                         k=args.k or 1.0, spacing_km=spacing)
    except ValueError as exc:
        raise ConfigError("network", str(exc)) from None
    if args.protocol:
        cfg = _scenario(args, (args.protocol,))
        (proto,) = _protocol_list(args, cfg)
        alpha = cfg.params.alpha_db_per_km
        K_of_l = lambda l: evaluate(proto, cfg.params, fiber_transmittance(alpha, l)).K
        label = proto
    else:
        K_of_l = power_law_rate(ns.k, args.alpha_db_per_km)
        label = f"t^{ns.k:g}"
    curve = network_cost(ns, K_of_l)
    rows = [{"spacing_km": float(l), "F_" + label: f, "cost": c if math.isfinite(c) else None}
            for l, f, c in zip(curve.spacing_km, curve.figure_of_merit, curve.cost)]
    if args.out:
        csvio.write_csv(args.out, ["spacing_km", "F_" + label, "cost"], rows)
    pairs = [("rate_model", label), ("l_opt_km", curve.l_opt)]
    if not args.protocol:
        pairs.append(("l_opt_analytic_km", l_opt_power_law(ns.k, args.alpha_db_per_km)))
    _print_kv(pairs)
    return EXIT_OK if curve.feasible else EXIT_INFEASIBLE


def cmd_repeater(args) -> int:
    rp = _repeater_params(args)
    if args.distance_km is not None:
        rp = rp.at_length(args.distance_km)
    res = rate_two_link(rp)
    _print_kv([("distance_km", rp.length_km), ("K_direct", rate_direct(rp)),
               ("K_two_link", res.K), ("tau_s", link_time(rp)),
               ("tau_approx_s", link_time_approx(rp)), ("eps", res.Q),
               ("fidelity_threshold", fidelity_threshold()),
               ("crossover_km", crossover_length(rp))])
    return EXIT_OK if res.feasible else EXIT_INFEASIBLE


# --- parser ----------------------------------------------------------------

def _add_common(p, grid=True):
    p.add_argument("--config", help="INI scenario file (overrides --set)")
    p.add_argument("--set", type=int, choices=(1, 2), default=1, help="device preset")
    p.add_argument("--protocol", help=f"one of {', '.join(PROTOCOLS)} (comma list for sweep)")
    p.add_argument("--out", help="output path")
    p.add_argument("--workers", type=int, default=1)
    if grid:
        p.add_argument("--grid", type=int, help="number of grid points")


def _add_point(p):
    p.add_argument("--t", type=float, help="channel transmittance")
    p.add_argument("--distance-km", dest="distance_km", type=float, help="fiber length")


def _add_repeater(p):
    p.add_argument("--nu-S", dest="nu_S", type=float)
    p.add_argument("--eta", type=float)
    p.add_argument("--eta-M", dest="eta_M", type=float)
    p.add_argument("--p-M", dest="p_M", type=float)
    p.add_argument("--N", type=int)
    p.add_argument("--T-M", dest="T_M", type=float, help="memory lifetime (s)")
    p.add_argument("--F", type=float, help="Bell-measurement fidelity")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="qkdrates", description="Secret key rates of practical QKD platforms.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("rate", help="single-point key rate")
    _add_common(p, grid=False)
    _add_point(p)
    p.add_argument("--qber", type=float, help="single-photon BB84 at a given QBER")
    p.add_argument("--f-ec", dest="f_ec", type=float, default=1.0)
    p.set_defaults(func=cmd_rate)

    p = sub.add_parser("sweep", help="optimized rates over a loss grid (CSV)")
    _add_common(p)
    p.add_argument("--figure", choices=sorted(FIGURES) + ["qmem"])
    p.add_argument("--x-min", dest="x_min", type=float, help="t_min, or min distance (km)")
    p.add_argument("--x-max", dest="x_max", type=float, help="t_max, or max distance (km)")
    p.add_argument("--svg", help="also plot to this SVG file")
    _add_repeater(p)
    p.add_argument("--F-b", dest="F_b", type=float, default=0.9,
                   help="fidelity of the second repeater line (qmem)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("optimize", help="optimize the source parameter at one point")
    _add_common(p, grid=False)
    _add_point(p)
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("simulate", help="Monte Carlo BB84 run")
    p.add_argument("--n", type=int, default=10 ** 6, help="pulses")
    p.add_argument("--p-ir", dest="p_ir", type=float, default=0.0)
    p.add_argument("--visibility", type=float, default=1.0)
    p.add_argument("--t", type=float)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--f-ec", dest="f_ec", type=float, default=1.0)
    p.add_argument("--pa-rate", dest="pa_rate", type=float)
    p.add_argument("--out")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("plot", help="SVG plot of a sweep CSV")
    p.add_argument("csv")
    p.add_argument("--out", required=True)
    p.add_argument("--x", help="x column (default: t, distance_km or spacing_km)")
    p.add_argument("--title")
    p.set_defaults(func=cmd_plot)

    p = sub.add_parser("network-cost", help="trusted-relay chain cost vs spacing")
    _add_common(p)
    p.add_argument("--k", type=float, help="power-law rate K ~ t^k instead of a protocol")
    p.add_argument("--L-km", dest="L_km", type=float, default=1000.0)
    p.add_argument("--k-target", dest="k_target", type=float, default=1.0)
    p.add_argument("--c1", type=float, default=1.0)
    p.add_argument("--alpha-db-per-km", dest="alpha_db_per_km", type=float, default=0.2)
    p.add_argument("--spacing-min-km", dest="spacing_min_km", type=float, default=0.5)
    p.add_argument("--spacing-max-km", dest="spacing_max_km", type=float, default=200.0)
    p.set_defaults(func=cmd_network_cost)

    p = sub.add_parser("repeater", help="two-link repeater vs direct link")
    _add_repeater(p)
    p.add_argument("--distance-km", dest="distance_km", type=float)
    p.set_defaults(func=cmd_repeater)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
