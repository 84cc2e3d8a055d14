"""Command line front end.

Subcommands:
  solve <config>        train each (seed, variant) and write the run artifacts
  sweep <config>        frequency sweep over [sweep] k_list for the four methods
  spectrum <config>     learned-solution spectra, standard vs strong-BC models
  compare <config...>   run several configs and emit a combined report

Exit codes: 0 success, 2 configuration/validation error, 3 training abort.
"""

from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from .. import analysis, fdm
from ..problems import ANALYSIS_CASES, make_problem
from ..trainer import ModelVariant, TrainingError, TrainingSchedule, predict_values, train
from . import report as rep
from . import svg
from .config import ConfigError, load_config

SPECTRUM_SAMPLES = 2048
TAIL_K_MIN = 30
SWEEP_METHODS = ("standard_pinn", "strong_bc_poly", "strong_bc_exp", "fdm")


def _spectrum_samples(model, problem, n=SPECTRUM_SAMPLES):
    """Normalized amplitude spectra (truth, model) along the first axis.

    2D problems are sampled on the midline of the second axis. Amplitudes are
    scaled by 2/N so a unit sine at integer frequency reads 1.0.
    """
    lo, hi = float(problem.lo[0]), float(problem.hi[0])
    xs = np.linspace(lo, hi, n, endpoint=False)
    if problem.dim == 1:
        pts = xs[:, None]
    else:
        mid = 0.5 * float(problem.lo[1] + problem.hi[1])
        pts = np.stack([xs, np.full(n, mid)], axis=1)
    length = hi - lo
    st = analysis.dft(problem.truth(pts), length)
    sm = analysis.dft(predict_values(model, pts), length)
    ks, amp_t = st.amplitudes_positive()
    _, amp_m = sm.amplitudes_positive()
    scale = 2.0 / n
    return ks, amp_t * scale, amp_m * scale, st, sm


def run_training_job(job: dict) -> dict:
    """Train one (case, variant, seed); returns plain picklable results."""
    problem = make_problem(job["case"], job["problem_params"])
    variant = ModelVariant(job["variant"], **job["variant_params"])
    schedule = TrainingSchedule(seed=job["seed"], **job["schedule_fields"])
    model, hist = train(variant, problem, schedule)
    ks, amp_t, amp_m, st, sm = _spectrum_samples(model, problem)
    return {
        "seed": job["seed"],
        "variant": job["variant"],
        "case": job["case"],
        "rel_l2": hist.final_rel_l2,
        "wall_clock_s": hist.wall_clock_s,
        "n_active_fourier": model.n_active_fourier(),
        "n_active_nn": model.n_active_nn(),
        "history": list(hist.records),
        "spectrum": (ks, amp_t, amp_m),
        "tail_truth": analysis.tail_energy(st, TAIL_K_MIN),
        "tail_model": analysis.tail_energy(sm, TAIL_K_MIN),
    }


def _run_jobs(jobs, n_jobs):
    if n_jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=n_jobs) as pool:
            return list(pool.map(run_training_job, jobs))
    return [run_training_job(j) for j in jobs]


def _make_jobs(cfg, variants=None, seeds=None, extra_problem=None):
    params = dict(cfg.problem_params)
    if extra_problem:
        params.update(extra_problem)
    return [{"case": cfg.case, "problem_params": params,
             "variant": v, "variant_params": dict(cfg.variant_params),
             "schedule_fields": dict(cfg.schedule_fields), "seed": s}
            for v in (variants or cfg.variants)
            for s in (seeds or cfg.seeds)]


def _history_prefix(out_dir, n_variants, variant):
    if n_variants == 1:
        return out_dir
    sub = os.path.join(out_dir, variant)
    os.makedirs(sub, exist_ok=True)
    return sub


def _write_run_artifacts(out_dir, cfg, results):
    rows = [(r["seed"], r["variant"], r["case"], r["rel_l2"],
             r["wall_clock_s"], r["n_active_fourier"], r["n_active_nn"])
            for r in results]
    rep.write_report(os.path.join(out_dir, "report.csv"), rows)

    err_series = []
    for r in results:
        d = _history_prefix(out_dir, len(cfg.variants), r["variant"])
        seed = r["seed"]
        rep.write_csv(os.path.join(d, f"history_{seed}.csv"),
                      rep.HISTORY_HEADER, r["history"])
        ks, amp_t, amp_m = r["spectrum"]
        rep.write_spectrum(os.path.join(d, f"spectrum_{seed}.csv"),
                           ks, amp_t, amp_m)
        label = (f"seed {seed}" if len(cfg.variants) == 1
                 else f"{r['variant']} seed {seed}")
        its = [rec[0] for rec in r["history"]]
        errs = [rec[5] for rec in r["history"]]
        err_series.append((label, its, errs))

    svg.line_chart(os.path.join(out_dir, "plot_error.svg"), err_series,
                   title=f"{cfg.case}: relative l2 over training",
                   xlabel="iteration", ylabel="relative l2")
    first = results[0]
    ks, amp_t, amp_m = first["spectrum"]
    kk = list(range(len(ks)))
    svg.line_chart(os.path.join(out_dir, "plot_spectrum.svg"),
                   [("truth", kk, list(amp_t)),
                    (f"{first['variant']} seed {first['seed']}", kk, list(amp_m))],
                   title=f"{cfg.case}: solution spectrum",
                   xlabel="frequency k", ylabel="amplitude")


def cmd_solve(args) -> int:
    cfg = load_config(args.config)
    out_dir = _resolve_out(cfg, args)
    seeds = [args.seed_override] if args.seed_override is not None else None
    results = _run_jobs(_make_jobs(cfg, seeds=seeds), args.jobs)
    _write_run_artifacts(out_dir, cfg, results)
    return 0


def _fdm_rel_l2(case, params, nodes):
    problem = make_problem(case, params)
    grid = fdm.Grid1D.regular(float(problem.lo[0]), float(problem.hi[0]), nodes)
    if problem.operator == "poisson":
        res = fdm.fdm_poisson(problem, grid)
    elif problem.operator == "allen_cahn":
        res = fdm.fdm_allen_cahn(problem, grid)
        if not res.converged:
            raise TrainingError("FDM Newton iteration did not converge")
    else:
        raise ConfigError("FDM reference supports the 1D steady cases only")
    truth = problem.truth(grid.nodes[:, None])
    return analysis.relative_l2(res.solution, truth)


def cmd_sweep(args) -> int:
    cfg = load_config(args.config)
    if not cfg.k_list:
        raise ConfigError("sweep requires a nonempty k_list in [sweep]")
    if not cfg.case.endswith("_sweep"):
        raise ConfigError("sweep requires a *_sweep case with a k parameter")
    out_dir = _resolve_out(cfg, args)
    seeds = [args.seed_override] if args.seed_override is not None else cfg.seeds

    jobs = []
    for k in cfg.k_list:
        jobs.extend(_make_jobs(cfg, variants=list(SWEEP_METHODS[:3]),
                               seeds=seeds, extra_problem={"k": k}))
    # jobs are ordered (k, method, seed); recover the grouping by index
    results = _run_jobs(jobs, args.jobs)
    by_key = {}
    for job, r in zip(jobs, results):
        key = (job["problem_params"]["k"], job["variant"])
        by_key.setdefault(key, []).append(r["rel_l2"])

    med_rows, spread_rows = [], []
    series = {m: [] for m in SWEEP_METHODS}
    for k in cfg.k_list:
        med, spread = [k], [k]
        for m in SWEEP_METHODS[:3]:
            vals = np.sort(by_key[(k, m)])
            med.append(float(np.median(vals)))
            spread.append(float(vals[-1] - vals[0]))
            series[m].append(med[-1])
        e = _fdm_rel_l2(cfg.case, {**cfg.problem_params, "k": k}, cfg.fdm_nodes)
        med.append(e)
        spread.append(0.0)
        series["fdm"].append(e)
        med_rows.append(tuple(med))
        spread_rows.append(tuple(spread))

    header = ["k", *SWEEP_METHODS]
    rep.write_csv(os.path.join(out_dir, "sweep.csv"), header, med_rows)
    rep.write_csv(os.path.join(out_dir, "sweep_spread.csv"), header, spread_rows)
    svg.line_chart(os.path.join(out_dir, "plot_sweep.svg"),
                   [(m, cfg.k_list, series[m]) for m in SWEEP_METHODS],
                   title=f"{cfg.case}: median relative l2 vs frequency",
                   xlabel="frequency k", ylabel="relative l2")
    return 0


def cmd_spectrum(args) -> int:
    cfg = load_config(args.config)
    if cfg.case not in ANALYSIS_CASES:
        raise ConfigError(
            f"spectrum requires one of the analysis cases: "
            f"{', '.join(ANALYSIS_CASES)}")
    out_dir = _resolve_out(cfg, args)
    seeds = [args.seed_override] if args.seed_override is not None else cfg.seeds
    variants = ["standard_pinn", "strong_bc_exp"]
    jobs = _make_jobs(cfg, variants=variants, seeds=seeds)
    results = _run_jobs(jobs, args.jobs)

    tail_rows = []
    spec_series = None
    err_series = []
    for r in results:
        seed, variant = r["seed"], r["variant"]
        ks, amp_t, amp_m = r["spectrum"]
        rep.write_spectrum(os.path.join(out_dir,
                                        f"spectrum_{variant}_{seed}.csv"),
                           ks, amp_t, amp_m)
        tail_rows.append((variant, seed, r["tail_model"], r["tail_truth"]))
        if seed == seeds[0]:
            kk = list(range(len(ks)))
            if spec_series is None:
                spec_series = [("truth", kk, list(amp_t))]
            spec_series.append((variant, kk, list(amp_m)))
            err_series.append((variant, kk, list(np.abs(amp_t - amp_m))))
    rep.write_csv(os.path.join(out_dir, "tail_energy.csv"),
                  ["variant", "seed", "tail_model", "tail_truth"], tail_rows)
    svg.line_chart(os.path.join(out_dir, "plot_spectrum.svg"), spec_series,
                   title=f"{cfg.case}: learned-solution spectra",
                   xlabel="frequency k", ylabel="amplitude")
    svg.line_chart(os.path.join(out_dir, "plot_error.svg"), err_series,
                   title=f"{cfg.case}: spectrum amplitude error",
                   xlabel="frequency k", ylabel="absolute error")
    return 0


def cmd_compare(args) -> int:
    out_dir = args.out or "."
    os.makedirs(out_dir, exist_ok=True)
    all_rows = []
    curve_series = []
    for path in args.configs:
        cfg = load_config(path)
        stem = os.path.splitext(os.path.basename(path))[0]
        sub = os.path.join(out_dir, stem)
        os.makedirs(sub, exist_ok=True)
        seeds = ([args.seed_override] if args.seed_override is not None
                 else None)
        results = _run_jobs(_make_jobs(cfg, seeds=seeds), args.jobs)
        _write_run_artifacts(sub, cfg, results)
        for r in results:
            all_rows.append((r["seed"], r["variant"], r["case"], r["rel_l2"],
                             r["wall_clock_s"], r["n_active_fourier"],
                             r["n_active_nn"]))
        first = results[0]
        curve_series.append((f"{stem}:{first['variant']}",
                             [rec[0] for rec in first["history"]],
                             [rec[5] for rec in first["history"]]))
    rep.write_report(os.path.join(out_dir, "report.csv"), all_rows)
    svg.line_chart(os.path.join(out_dir, "plot_compare.svg"), curve_series,
                   title="relative l2 over training, per configuration",
                   xlabel="iteration", ylabel="relative l2")
    return 0


def _resolve_out(cfg, args) -> str:
    out_dir = args.out or cfg.out_dir
    os.makedirs(out_dir, exist_ok=True)
    return out_dir


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="pinnlab",
        description="PDE-solver laboratory for Fourier and strong-BC PINNs")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--jobs", type=int, default=1, metavar="N",
                        help="parallel training processes")
        sp.add_argument("--out", metavar="DIR", default=None,
                        help="output directory (overrides the config)")
        sp.add_argument("--seed-override", type=int, default=None, metavar="S",
                        help="run a single seed instead of the config list")

    for name, fn in (("solve", cmd_solve), ("sweep", cmd_sweep),
                     ("spectrum", cmd_spectrum)):
        sp = sub.add_parser(name)
        sp.add_argument("config")
        common(sp)
        sp.set_defaults(fn=fn)
    sp = sub.add_parser("compare")
    sp.add_argument("configs", nargs="+")
    common(sp)
    sp.set_defaults(fn=cmd_compare)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.jobs < 1:
        print("error: --jobs must be >= 1", file=sys.stderr)
        return 2
    try:
        return args.fn(args)
    except (ConfigError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except TrainingError as e:
        print(f"training aborted: {e}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
