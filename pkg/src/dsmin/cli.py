"""Command-line experiment runner.

Subcommands and their CSV outputs (first lines are ``#`` headers with the full
configuration and seed):

  weights       pattern.csv   angle_deg, gain_db_aw_mini_ds, gain_db_proposed
                metrics.csv   method, normalized_ds, normalized_efficiency
  sweep-spread  sweep_spread.csv
                spread_deg, method, epsilon, normalized_ds, normalized_efficiency
  select        select.csv    n_rf, proposed_ds, baseline_n_element_ds,
                              baseline_m_element_ds, sigma_final, support
  simulate      psd_empirical.csv, psd_analytic.csv  omega_tilde, psd
                summary.txt   L1 distance and empirical vs analytic spread
  moments-dump  c0.txt, c2.txt  row-major "re,im" pairs

Spreads are normalized (divided by the maximum Doppler shift in rad/s).
Angles are in degrees. Exit codes: 0 success, 2 configuration error,
3 numerical failure, 4 I/O error.
"""
from __future__ import annotations

import argparse
import csv
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .config import COMMANDS, ConfigError, Settings, load_settings
from .errors import DegenerateBeamError, InfeasibleError, InvalidArgumentError, NumericalFailure
from .geometry import AngleRegion, ArrayConfig, equicos_directions
from .metrics import (
    WeightVector,
    normalized_doppler_spread,
    radiation_efficiency,
    radiation_pattern,
    lobe_levels,
)
from .moments import build_moments, write_matrix
from .simulator import (
    ChannelConfig,
    analytic_psd_bins,
    analytic_received_power,
    default_sampling_interval,
    empirical_doppler_spread,
    l1_distance,
    monte_carlo_psd,
)
from .solvers import (
    EfficiencyConstraint,
    min_ds_weights,
    min_quotient,
    spca_minimize_ds,
    two_step_select_and_weight,
)

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_IO = 0, 2, 3, 4


class _IOFailure(Exception):
    pass


def _header(settings: Settings):
    return [f"{k} = {_fmt(v)}" for k, v in settings.header_items()]


def _fmt(v):
    if isinstance(v, (list, tuple)):
        return " ".join(_fmt(x) for x in v)
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _write_csv(path: Path, settings, columns, rows):
    try:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            for line in _header(settings):
                fh.write(f"# {line}\n")
            wr = csv.writer(fh, lineterminator="\n")
            wr.writerow(columns)
            for row in rows:
                wr.writerow([_cell(x) for x in row])
    except OSError as exc:
        raise _IOFailure(f"{path}: {exc.strerror or exc}") from exc
    return path


def _write_text(path: Path, settings, body: str):
    try:
        with open(path, "w", encoding="utf-8") as fh:
            for line in _header(settings):
                fh.write(f"# {line}\n")
            fh.write(body)
    except OSError as exc:
        raise _IOFailure(f"{path}: {exc.strerror or exc}") from exc
    return path


def _cell(x):
    if isinstance(x, float):
        return f"{x:.12g}"
    return x


def _scenario(s: Settings, theta_l=None, theta_r=None):
    region = AngleRegion.from_degrees(theta_l if theta_l is not None else s.theta_l_deg,
                                      theta_r if theta_r is not None else s.theta_r_deg)
    return region, ArrayConfig(s.m_antennas, s.spacing)


def _trace_name(label):
    return "trace_" + "".join(c if c.isalnum() or c in "-_." else "_" for c in label) + ".txt"


def cmd_weights(s: Settings, out: Path, trace: bool):
    region, arr = _scenario(s)
    mm = build_moments(region, arr, s.quad_nodes)
    w_base, _ = min_ds_weights(mm)
    rep = spca_minimize_ds(mm, EfficiencyConstraint(s.epsilon), tol=s.tol, max_iters=s.max_iters)
    methods = {"aw-mini-ds": w_base, "proposed": rep.final_weights}
    bank = equicos_directions(region, s.q_count)
    n = int(round(180.0 / s.pattern_step_deg))
    grid = np.deg2rad(np.arange(1, n) * s.pattern_step_deg)
    branch = None if s.single_branch < 0 else s.single_branch
    pats = {k: radiation_pattern(w, bank, grid, arr, branch) for k, w in methods.items()}
    rows = zip(np.rad2deg(grid), pats["aw-mini-ds"][2], pats["proposed"][2])
    files = [_write_csv(out / "pattern.csv", s, ["angle_deg", "gain_db_aw_mini_ds", "gain_db_proposed"],
                        ([float(a), float(b), float(c)] for a, b, c in rows))]
    mrows = []
    for k, w in methods.items():
        mrows.append([k, normalized_doppler_spread(w, mm), radiation_efficiency(w, mm)[1]])
    files.append(_write_csv(out / "metrics.csv", s,
                            ["method", "normalized_ds", "normalized_efficiency"], mrows))
    if trace:
        rep = type(rep)(rep.iterates, rep.feasibility_residuals, rep.termination,
                        rep.final_weights, label=f"proposed epsilon={s.epsilon}", extra=rep.extra)
        files.append(_write_text(out / _trace_name("proposed"), s, rep.to_trace()))
    return files


def _sweep_point(args):
    spread, center, m, d, eps_list, nodes, tol, max_iters = args
    region = AngleRegion.centered(spread, center)
    mm = build_moments(region, ArrayConfig(m, d), nodes)
    w, ds = min_ds_weights(mm)
    rows = [[spread, "aw-mini-ds", "", ds, radiation_efficiency(w, mm)[1]]]
    reports = []
    for eps in eps_list:
        rep = spca_minimize_ds(mm, EfficiencyConstraint(eps), tol=tol, max_iters=max_iters)
        wf = rep.final_weights
        rows.append([spread, "proposed", eps, normalized_doppler_spread(wf, mm),
                     radiation_efficiency(wf, mm)[1]])
        reports.append((eps, rep))
    return rows, reports


def _pool_map(fn, jobs, workers):
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            return list(ex.map(fn, jobs))
    return [fn(j) for j in jobs]


def cmd_sweep_spread(s: Settings, out: Path, trace: bool):
    jobs = [(sp, s.center_deg, s.m_antennas, s.spacing, s.epsilons, s.quad_nodes, s.tol, s.max_iters)
            for sp in s.spreads_deg]
    results = _pool_map(_sweep_point, jobs, s.workers)
    rows = [r for res, _ in results for r in res]
    files = [_write_csv(out / "sweep_spread.csv", s,
                        ["spread_deg", "method", "epsilon", "normalized_ds", "normalized_efficiency"],
                        rows)]
    if trace:
        for sp, (_, reps) in zip(s.spreads_deg, results):
            for eps, rep in reps:
                label = f"spread{sp:g}_eps{eps:g}"
                files.append(_write_text(out / _trace_name(label), s, rep.to_trace()))
    return files


def baseline_subarray(m, n, layout="contiguous"):
    """Element indices of the N-element comparison array.

    ``contiguous`` keeps the first N elements; ``spread`` spaces N elements as
    evenly as possible over the full aperture.
    """
    if layout == "contiguous":
        return np.arange(n)
    return np.unique(np.round(np.linspace(0, m - 1, n)).astype(int))


def _select_point(args):
    n, m, d, tl, tr, eps, zero_tol, nodes, layout = args
    mm = build_moments(AngleRegion.from_degrees(tl, tr), ArrayConfig(m, d), nodes)
    c = EfficiencyConstraint(eps) if eps is not None else None
    res = two_step_select_and_weight(mm, n, c, zero_tol)
    sub = mm.restrict(res.support)
    if c is None:
        prop = float(np.sqrt(min_quotient(sub.c0, sub.c2)))
    else:
        prop = normalized_doppler_spread(res.report.final_weights, sub)
    idx = baseline_subarray(m, n, layout)
    base_n = float(np.sqrt(min_quotient(mm.c0[np.ix_(idx, idx)], mm.c2[np.ix_(idx, idx)])))
    base_m = float(np.sqrt(min_quotient(mm.c0, mm.c2)))
    return [n, prop, base_n, base_m, float(np.sqrt(res.sigma_final)),
            " ".join(str(i) for i in res.support)], res


def cmd_select(s: Settings, out: Path, trace: bool):
    jobs = [(n, s.m_antennas, s.spacing, s.theta_l_deg, s.theta_r_deg, s.epsilon, s.zero_tol,
             s.quad_nodes, s.n_element_baseline) for n in s.budgets]
    results = _pool_map(_select_point, jobs, s.workers)
    files = [_write_csv(out / "select.csv", s,
                        ["n_rf", "proposed_ds", "baseline_n_element_ds", "baseline_m_element_ds",
                         "sigma_final", "support"], [r for r, _ in results])]
    if trace:
        for n, (_, res) in zip(s.budgets, results):
            body = "sigma,support_size\n" + "".join(f"{a:.17g},{b}\n" for a, b in res.visits)
            if res.report is not None:
                body += res.report.to_trace()
            files.append(_write_text(out / _trace_name(f"select_n{n}"), s, body))
    return files


def _parse_weights(text, m):
    try:
        vals = [complex(t.replace(" ", "")) for t in text.replace(";", ",").split(",") if t.strip()]
    except ValueError:
        raise ConfigError(f"weight_values: cannot parse {text!r}") from None
    if len(vals) != m:
        raise ConfigError(f"weight_values: expected {m} entries, got {len(vals)}")
    if not any(vals):
        raise ConfigError("weight_values: weight vector must not be all zero")
    return WeightVector(np.array(vals))


def cmd_simulate(s: Settings, out: Path, trace: bool):
    region, arr = _scenario(s)
    if s.weights == "values":
        w = _parse_weights(s.weight_values, s.m_antennas)
    mm = build_moments(region, arr, s.quad_nodes)
    if s.weights == "aw-mini-ds":
        w, _ = min_ds_weights(mm)
    elif s.weights == "proposed":
        w = spca_minimize_ds(mm, EfficiencyConstraint(s.epsilon)).final_weights
    elif s.weights == "uniform":
        w = WeightVector(np.ones(s.m_antennas))
    t_s = s.t_s if s.t_s is not None else default_sampling_interval(region, s.f_d, s.oversample)
    cfg = ChannelConfig(region, arr, equicos_directions(region, s.q_count), s.f_d, t_s,
                        block_len=s.block_len, n_paths=s.n_paths,
                        n_realizations=s.n_realizations, seed=s.seed,
                        random_angles=s.random_angles)
    mc = monte_carlo_psd(cfg, w, workers=s.workers)
    pa = analytic_psd_bins(w, mm, mc.psd)
    files = [
        _write_csv(out / "psd_empirical.csv", s, ["omega_tilde", "psd"],
                   ([float(x), float(v)] for x, v in zip(mc.psd.omega_tilde, mc.psd.value))),
        _write_csv(out / "psd_analytic.csv", s, ["omega_tilde", "psd"],
                   ([float(x), float(v)] for x, v in zip(mc.psd.omega_tilde, pa))),
    ]
    wd = 2.0 * np.pi * s.f_d
    emp = empirical_doppler_spread(mc.psd)
    ana = wd * normalized_doppler_spread(w, mm)
    summary = (
        f"l1_distance = {l1_distance(mc.psd, pa):.6g}\n"
        f"sigma_d_empirical = {emp:.6g}\n"
        f"sigma_d_analytic = {ana:.6g}\n"
        f"sigma_d_ratio = {emp / ana:.6g}\n"
        f"mean_power = {mc.mean_power:.6g}\n"
        f"analytic_power = {analytic_received_power(w, mm):.6g}\n"
        f"t_s = {t_s:.12g}\n"
    )
    files.append(_write_text(out / "summary.txt", s, summary))
    return files


def cmd_moments_dump(s: Settings, out: Path, trace: bool):
    region, arr = _scenario(s)
    mm = build_moments(region, arr, s.quad_nodes)
    head = _header(s) + [f"lambda_max_c0 = {mm.lambda_max_c0!r}", f"converged_nodes = {mm.quad_nodes}"]
    files = []
    for name, mat in (("c0.txt", mm.c0), ("c2.txt", mm.c2)):
        path = out / name
        try:
            write_matrix(path, mat, header=head)
        except OSError as exc:
            raise _IOFailure(f"{path}: {exc.strerror or exc}") from exc
        files.append(path)
    return files


_HANDLERS = {
    "weights": cmd_weights,
    "sweep-spread": cmd_sweep_spread,
    "select": cmd_select,
    "simulate": cmd_simulate,
    "moments-dump": cmd_moments_dump,
}


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="INI configuration file")
    common.add_argument("--out", metavar="DIR", default=".", help="output directory (created)")
    common.add_argument("--trace", action="store_true", help="write solver trace files")
    common.add_argument("--seed", type=int, help="override the configured seed")
    common.add_argument("--quad-nodes", type=int, help="starting quadrature nodes per panel")
    common.add_argument("--workers", type=int, help="worker processes for sweeps")
    p = argparse.ArgumentParser(prog="dsmin", description=__doc__,
                                formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, metavar="COMMAND")
    helps = {
        "weights": "baseline and efficiency-constrained weights, pattern and metrics",
        "sweep-spread": "spread and efficiency versus angle spread around a center",
        "select": "antenna selection versus RF-chain budget",
        "simulate": "Monte-Carlo PSD against the analytic PSD",
        "moments-dump": "write C0 and C2 as text matrices",
    }
    for name in COMMANDS:
        sub.add_parser(name, parents=[common], help=helps[name])
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        settings = load_settings(args.command, args.config,
                                 {"seed": args.seed, "quad_nodes": args.quad_nodes,
                                  "workers": args.workers})
        out = Path(args.out)
        try:
            out.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise _IOFailure(f"{out}: {exc.strerror or exc}") from exc
        files = _HANDLERS[args.command](settings, out, args.trace)
    except (ConfigError, InvalidArgumentError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except FileNotFoundError as exc:
        print(f"configuration error: {exc.filename}: not found", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericalFailure, InfeasibleError, DegenerateBeamError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except _IOFailure as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    for f in files:
        print(f)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
