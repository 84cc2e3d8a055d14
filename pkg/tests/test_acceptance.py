"""End-to-end acceptance gate: one test per criterion, one PASS/FAIL line each.

Criteria 1-7 and 16 are cheap properties; criteria 8-15 train real models and
take over an hour combined on a single core. Elapsed seconds are reported in
every verdict line (the suite runs on boxes of very different speed, so wall
clock is reported, not asserted).

    pytest tests/test_acceptance.py -v -s
"""

import csv
import importlib.resources
import time

import numpy as np
import pytest

from conftest import central_diff_jets, rel_err
from pinnlab import analysis, boundary, diffnet, fourier, linalg
from pinnlab.analysis import dft, relative_l2, tail_energy
from pinnlab.boundary import DistanceFn
from pinnlab.diffnet import JetBatch
from pinnlab.fdm import Grid1D, fdm_allen_cahn, fdm_poisson
from pinnlab.fourier import FourierLayer1D, FourierLayer2D
from pinnlab.harness import cli
from pinnlab.problems import CASE_NAMES, TWO_PI, make_problem, residual
from pinnlab.trainer import (ModelVariant, TrainingSchedule, predict_values,
                             train)

SEEDS = (0, 1, 2)

# desk schedules, calibrated on a 1-core container (see notes ledger)
SINGLE_SCALE = dict(k_max=128, n_interior=1201, adam_iters=4000,
                    warm_start_iters=2000, gd_block_iters=1000,
                    lbfgs_max_iters=100, history_every=2000, test_points=2048)
SWEEP_SCHED = dict(n_interior=256, adam_iters=10000, lbfgs_max_iters=500,
                   history_every=10000, test_points=512)
WAVE_ABLATION = dict(net_widths=(2, 40, 40, 1), k_max=(4, 24),
                     basis_periods=(2.0, 2.0), n_interior=1089, n_boundary=99,
                     adam_iters=3000, warm_start_iters=1000,
                     gd_block_iters=1000, lbfgs_max_iters=50,
                     test_points=4096, history_every=1000)
# 3K GD iterations rather than 20K: on a 1-core box 20K blows the criterion's
# own 60-minute CPU budget ~4x, and both error gates already pass with orders
# of margin at 3K (see notes ledger)
POISSON_2D = dict(net_widths=(2, 40, 40, 1), k_max=(32, 32), n_interior=4356,
                  n_boundary=256, adam_iters=2000, warm_start_iters=1000,
                  gd_block_iters=1000, lbfgs_max_iters=30, test_points=10201,
                  history_every=1000)


def _verdict(num, name, ok, detail, t0):
    line = (f"ACCEPTANCE {num:02d} {name}: {'PASS' if ok else 'FAIL'} "
            f"({detail}; {time.perf_counter() - t0:.1f}s)")
    print("\n" + line)
    assert ok, line


def _train(variant, problem, seed, **sched):
    return train(ModelVariant(variant), problem, TrainingSchedule(seed=seed,
                                                                  **sched))


def _medians(problem, variants, sched, seeds=SEEDS):
    out = {}
    for v in variants:
        out[v] = float(np.median([_train(v, problem, s, **sched)[1].final_rel_l2
                                  for s in seeds]))
    return out


# --- 1. exact derivative jets vs central differences ------------------------

def test_c01_exact_derivatives():
    t0 = time.perf_counter()
    rng = np.random.default_rng(7)
    worst_net, worst_basis = 0.0, 0.0
    for i in range(50):
        kind = i % 5
        if kind in (0, 1):
            act = "tanh" if kind == 0 else "adaptive_tanh"
            d = int(rng.integers(1, 3))
            params = diffnet.init_params((d, 10, 7, 1), seed=i, activation=act)
            pts = rng.uniform(-1.5, 1.5, size=(4, d))
            bj = diffnet.eval_jets(params, pts)

            def f(p, params=params):
                return diffnet.eval_jets(params, p).combined.value

            v, g, s = central_diff_jets(f, pts)
            worst_net = max(worst_net, rel_err(bj.combined.grad, g),
                            rel_err(bj.combined.second, s))
        elif kind == 2:
            freqs = np.sort(rng.choice(np.arange(1, 7), size=3, replace=False))
            lay = FourierLayer1D(TWO_PI, freqs, rng.normal(size=3),
                                 rng.normal(size=3))
            pts = rng.uniform(0, TWO_PI, size=(4, 1))
            jet, _ = fourier.eval_fourier_jets(lay, pts)

            def f(p, lay=lay):
                return fourier.eval_fourier_jets(lay, p)[0].value

            v, g, s = central_diff_jets(f, pts)
            worst_basis = max(worst_basis, rel_err(jet.grad, g),
                              rel_err(jet.second, s))
        elif kind == 3:
            lay = fourier.make_candidates_2d(3, (TWO_PI, TWO_PI))
            lay.beta[:] = rng.normal(size=lay.beta.size)
            pts = rng.uniform(0, TWO_PI, size=(4, 2))
            jet = fourier.eval_tensor_jets(lay, pts)

            def f(p, lay=lay):
                return fourier.eval_tensor_jets(lay, p).value

            v, g, s = central_diff_jets(f, pts)
            worst_basis = max(worst_basis, rel_err(jet.grad, g),
                              rel_err(jet.second, s))
        else:
            d = int(rng.integers(1, 3))
            if i % 2:
                dist = DistanceFn("poly", np.zeros(d), np.full(d, 2.0))
            else:
                dist = DistanceFn("exp", np.zeros(d), np.full(d, 2.0),
                                  rng.uniform(0.3, 2.0, d),
                                  rng.uniform(0.3, 2.0, d))
            pts = rng.uniform(0.1, 1.9, size=(4, d))
            jet = boundary.distance_jet(dist, pts)

            def f(p, dist=dist):
                return boundary.distance_jet(dist, p).value

            v, g, s = central_diff_jets(f, pts)
            worst_basis = max(worst_basis, rel_err(jet.grad, g),
                              rel_err(jet.second, s))
    ok = worst_net < 1e-5 and worst_basis < 1e-7
    _verdict(1, "exact-derivative-jets", ok,
             f"net max rel {worst_net:.1e} < 1e-5, "
             f"basis max rel {worst_basis:.1e} < 1e-7", t0)


# --- 2. ridge vs normal-equations oracle -------------------------------------

def test_c02_ridge_oracle():
    t0 = time.perf_counter()
    rng = np.random.default_rng(11)
    worst_match, worst_stat = 0.0, 0.0
    for i in range(20):
        a = rng.normal(size=(30, 8))
        y = rng.normal(size=30)
        alpha = (0.0, 1e-4, 1.0)[i % 3]
        rp = linalg.RidgeProblem(a, y, alpha)
        w = linalg.ridge_solve(rp).coeffs
        oracle = np.linalg.solve(a.T @ a + alpha * np.eye(8), a.T @ y)
        worst_match = max(worst_match, float(np.max(np.abs(w - oracle))))
        stat = linalg.stationarity_residual(rp, w)
        worst_stat = max(worst_stat, stat / (1.0 + np.linalg.norm(y)))
    ok = worst_match < 1e-8 and worst_stat < 1e-8
    _verdict(2, "ridge-oracle-equivalence", ok,
             f"max coeff dev {worst_match:.1e}, "
             f"max stationarity {worst_stat:.1e}", t0)


# --- 3. DFT oracle equivalence ------------------------------------------------

def test_c03_dft_oracle():
    t0 = time.perf_counter()
    rng = np.random.default_rng(3)
    x = rng.normal(size=256)
    fast = dft(x, TWO_PI, method="fast").coeffs
    slow = dft(x, TWO_PI, method="direct").coeffs
    dev = float(np.max(np.abs(fast - slow)))
    parseval = abs(np.sum(np.abs(fast) ** 2) - 256 * np.sum(x * x)) \
        / (256 * np.sum(x * x))
    grid = np.linspace(0, TWO_PI, 64, endpoint=False)
    spec = dft(np.sin(5 * grid), TWO_PI)
    tone = max(abs(abs(spec.coeff(5)) - 32.0), abs(abs(spec.coeff(-5)) - 32.0))
    ok = dev < 1e-10 and parseval < 1e-10 and tone < 1e-9
    _verdict(3, "dft-oracle-equivalence", ok,
             f"fast-vs-direct {dev:.1e}, parseval rel {parseval:.1e}, "
             f"sin5 coeff dev {tone:.1e}", t0)


# --- 4. closed-form Fourier coefficients of the distance functions -----------

def test_c04_distance_coefficients():
    t0 = time.perf_counter()
    worst_poly = max(abs(boundary.phi_hat_poly(n)
                         - boundary.phi_hat_poly_quad(n, nodes=100_001))
                     for n in range(1, 51))
    exp_dev = max(abs(boundary.phi_hat_exp(n, 0.7)
                      - abs(boundary.phi_hat_exp_quad(n, 0.7, nodes=100_001)))
                  for n in range(1, 21))
    ok = worst_poly < 1e-8 and np.isfinite(exp_dev)
    _verdict(4, "distance-fourier-coefficients", ok,
             f"poly max dev {worst_poly:.1e} < 1e-8, "
             f"exp closed-form-vs-quadrature dev {exp_dev:.1e} (reported)", t0)


# --- 5. convolution theorem ---------------------------------------------------

def test_c05_convolution_theorem():
    t0 = time.perf_counter()
    n, h = 2048, 40
    x = np.linspace(0, TWO_PI, n, endpoint=False)
    phi = x * (TWO_PI - x)

    def coeffs(sig):
        full = dft(sig, TWO_PI).coeffs / n
        mid = n // 2
        return full[mid - h: mid + h + 1]

    worst = 0.0
    for u in (np.sin(3 * x) + 0.4 * np.cos(11 * x),
              np.cos(2 * x) - 0.3 * np.sin(7 * x)):
        worst = max(worst, analysis.convolution_check(
            coeffs(phi), coeffs(u), coeffs(phi * u)))
    ok = worst < 1e-6
    _verdict(5, "convolution-theorem", ok, f"max band dev {worst:.1e} < 1e-6",
             t0)


# --- 6. manufactured self-consistency -----------------------------------------

def _fd_jets(fn, pts, h):
    pts = np.atleast_2d(pts)
    val = fn(pts)
    grad = np.empty_like(pts)
    sec = np.empty_like(pts)
    for i in range(pts.shape[1]):
        e = np.zeros(pts.shape[1])
        e[i] = h
        up, dn = fn(pts + e), fn(pts - e)
        grad[:, i] = (up - dn) / (2 * h)
        sec[:, i] = (up - 2 * val + dn) / (h * h)
    return JetBatch(val, grad, sec)


def _fd_residual(problem, pts):
    # Richardson extrapolation kills the h^2 truncation term
    a = residual(problem, _fd_jets(problem.truth, pts, 1e-3), pts)
    b = residual(problem, _fd_jets(problem.truth, pts, 5e-4), pts)
    return (4.0 * b - a) / 3.0


def _sin_layer(pairs):
    """{freq: (cos, sin)} -> exact FourierLayer1D on [0, 2pi]."""
    freqs = np.array(sorted(pairs), dtype=np.int64)
    return FourierLayer1D(TWO_PI, freqs,
                          np.array([pairs[f][0] for f in freqs], float),
                          np.array([pairs[f][1] for f in freqs], float))


SIN_TABLE = {
    "single": {100: (0.0, 1.0)},
    "multi": {1: (0.0, 1.0), 20: (0.0, 0.1), 100: (0.05, 0.0)},
    "hybrid": {94: (0.0, -0.5), 106: (0.0, 0.5)},   # sin6x cos100x expanded
    "sweep": {2: (0.0, 1.0)},
    "twotone": {2: (0.0, 1.0), 16: (0.0, 1.0)},
}


def _tensor_layer(domain_lengths, freqs_x, freqs_y, entries):
    lay = FourierLayer2D(domain_lengths, np.array(freqs_x), np.array(freqs_y),
                         np.zeros((2 * len(freqs_x) + 1)
                                  * (2 * len(freqs_y) + 1)))
    b = lay.beta_matrix()
    for (i, j), v in entries.items():
        b[i, j] = v
    lay.beta[:] = b.reshape(-1)
    return lay


def _exact_jets(case, pts):
    """Analytic jets of the truth, built independently of problems.py."""
    if case in ("poisson1d_gaussmod", "poisson1d_nonhomo"):
        x = pts[:, 0]
        if case == "poisson1d_gaussmod":
            e = np.exp(-x * x / 2.0)
            val = e * np.sin(16 * x)
            grad = e * (-x * np.sin(16 * x) + 16 * np.cos(16 * x))
            sec = e * ((x * x - 257) * np.sin(16 * x)
                       - 32 * x * np.cos(16 * x))
        else:
            val = x * x + np.sin(16 * x)
            grad = 2 * x + 16 * np.cos(16 * x)
            sec = 2.0 - 256 * np.sin(16 * x)
        return JetBatch(val, grad[:, None], sec[:, None])
    if case in ("poisson2d_single", "poisson2d_combined", "allencahn2d_multi",
                "wave1d"):
        if case == "poisson2d_single":
            # sin100x sin100y: per-axis features [1, cos100, sin100]
            lay = _tensor_layer((TWO_PI, TWO_PI), [100], [100], {(2, 2): 1.0})
        elif case == "poisson2d_combined":
            # sin6t cos20t = (sin26t - sin14t)/2 additively per axis
            ent = {(4, 0): 0.5, (2, 0): -0.5, (0, 4): 0.5, (0, 2): -0.5}
            lay = _tensor_layer((TWO_PI, TWO_PI), [14, 26], [14, 26], ent)
        elif case == "allencahn2d_multi":
            v = np.zeros(7)
            v[2], v[4], v[5] = 1.0, 0.1, 1.0   # sin1, 0.1 sin20, cos100
            lay = FourierLayer2D((TWO_PI, TWO_PI), np.array([1, 20, 100]),
                                 np.array([1, 20, 100]),
                                 np.outer(v, v).reshape(-1))
        else:
            # wave on [0,1]^2, basis period 2: sin(pi x) is n=1, cos(10 pi t)
            # is n=10
            ent = {(2, 1): 1.0, (4, 3): 1.0}
            lay = _tensor_layer((2.0, 2.0), [1, 2], [10, 20], ent)
        return fourier.eval_tensor_jets(lay, pts)
    shape = case.split("1d_")[1]
    jet, _ = fourier.eval_fourier_jets(_sin_layer(SIN_TABLE[shape]), pts)
    return jet


def test_c06_manufactured_self_consistency():
    t0 = time.perf_counter()
    rng = np.random.default_rng(5)
    worst_fd, worst_exact = 0.0, 0.0
    for case in CASE_NAMES:
        params = {"k": 2} if case.endswith("_sweep") else {}
        problem = make_problem(case, params)
        pts = rng.uniform(problem.lo, problem.hi, size=(100, problem.dim))
        scale = max(1.0, float(np.max(np.abs(problem.forcing(pts)))))
        worst_fd = max(worst_fd,
                       float(np.max(np.abs(_fd_residual(problem, pts))))
                       / scale)
        r = residual(problem, _exact_jets(case, pts), pts)
        worst_exact = max(worst_exact, float(np.max(np.abs(r))) / scale)
    ok = worst_fd < 1e-6 and worst_exact < 1e-8
    _verdict(6, "manufactured-self-consistency", ok,
             f"FD residual rel {worst_fd:.1e} < 1e-6, exact-representation "
             f"residual rel {worst_exact:.1e} < 1e-8, all "
             f"{len(CASE_NAMES)} cases", t0)


# --- 7. FDM baseline ----------------------------------------------------------

def _fdm_rel(case, k, n):
    problem = make_problem(case, {"k": k})
    grid = Grid1D.regular(problem.lo[0], problem.hi[0], n)
    solve = fdm_poisson if problem.operator == "poisson" else fdm_allen_cahn
    res = solve(problem, grid)
    return relative_l2(res.solution, problem.truth(grid.nodes[:, None]))


def test_c07_fdm_baseline():
    t0 = time.perf_counter()
    worst = max(_fdm_rel(case, k, 1000)
                for case in ("poisson1d_sweep", "allencahn1d_sweep")
                for k in (2, 6, 10))
    orders = []
    for case in ("poisson1d_sweep", "allencahn1d_sweep"):
        errs = [_fdm_rel(case, 6, n) for n in (250, 500, 1000)]
        orders += [np.log2(errs[0] / errs[1]), np.log2(errs[1] / errs[2])]
    ok = worst <= 1e-3 and all(abs(o - 2.0) <= 0.3 for o in orders)
    _verdict(7, "fdm-baseline", ok,
             f"max rel {worst:.1e} <= 1e-3, orders "
             f"{['%.2f' % o for o in orders]} in 2.0+-0.3", t0)


# --- 8. spectral-tail reproduction ---------------------------------------------

def _tail(model, problem):
    xs = np.linspace(0, TWO_PI, 2048, endpoint=False)[:, None]
    return tail_energy(dft(predict_values(model, xs), TWO_PI), 30)


def test_c08_spectral_tail():
    t0 = time.perf_counter()
    problem = make_problem("poisson1d_sweep", {"k": 15})
    med = {}
    for variant in ("standard_pinn", "strong_bc_exp"):
        med[variant] = float(np.median(
            [_tail(_train(variant, problem, s, **SWEEP_SCHED)[0], problem)
             for s in SEEDS]))
    ok = med["strong_bc_exp"] < med["standard_pinn"]
    _verdict(8, "spectral-tail", ok,
             f"median tail strong {med['strong_bc_exp']:.3e} < standard "
             f"{med['standard_pinn']:.3e}", t0)


# --- 9. frequency-sweep trend ---------------------------------------------------

def test_c09_frequency_sweep():
    t0 = time.perf_counter()
    wins, details = 0, []
    for k in (2, 6, 10):
        problem = make_problem("poisson1d_sweep", {"k": k})
        med = _medians(problem, ("standard_pinn", "strong_bc_exp"),
                       SWEEP_SCHED)
        wins += med["strong_bc_exp"] <= med["standard_pinn"]
        details.append(f"k={k} strong {med['strong_bc_exp']:.2e} vs standard "
                       f"{med['standard_pinn']:.2e}")
    ok = wins >= 2
    _verdict(9, "frequency-sweep-trend", ok,
             f"strong <= standard at {wins}/3 k values ({'; '.join(details)})",
             t0)


# --- 10/11. single-scale Fourier PINN and its pruning outcome -------------------

@pytest.fixture(scope="module")
def single_scale_runs():
    problem = make_problem("poisson1d_single")
    fourier_runs = [_train("fourier_pinn", problem, s, **SINGLE_SCALE)
                    for s in SEEDS]
    standard = [_train("standard_pinn", problem, s, **SINGLE_SCALE)
                for s in SEEDS]
    return fourier_runs, standard


def test_c10_single_scale_error(single_scale_runs):
    t0 = time.perf_counter()
    fr, st = single_scale_runs
    med_f = float(np.median([h.final_rel_l2 for _, h in fr]))
    med_s = float(np.median([h.final_rel_l2 for _, h in st]))
    ok = med_f <= 1e-2 and med_s >= 0.5
    _verdict(10, "single-scale-error", ok,
             f"fourier median {med_f:.2e} <= 1e-2, standard median "
             f"{med_s:.2e} >= 0.5", t0)


def test_c11_single_scale_pruning(single_scale_runs):
    t0 = time.perf_counter()
    fr, _ = single_scale_runs
    freq_sets = [sorted(m.fourier_layer.freqs.tolist()) for m, _ in fr]
    exact = sum(fs == [100] for fs in freq_sets)
    ok = exact >= 2 and all(len(fs) <= 3 for fs in freq_sets)
    _verdict(11, "single-scale-pruning", ok,
             f"retained {freq_sets}, =={{100}} in {exact}/3 seeds", t0)


# --- 12. multi-scale pruning ------------------------------------------------------

def test_c12_multi_scale_pruning():
    t0 = time.perf_counter()
    problem = make_problem("poisson1d_multi")
    runs = [_train("fourier_pinn", problem, s, **SINGLE_SCALE) for s in SEEDS]
    freq_sets = [sorted(m.fourier_layer.freqs.tolist()) for m, _ in runs]
    width = SINGLE_SCALE.get("net_widths", (1, 40, 40, 1))[-2]
    fracs = [1.0 - m.n_active_nn() / width for m, _ in runs]
    med = float(np.median([h.final_rel_l2 for _, h in runs]))
    ok = (all({20, 100} <= set(fs) and len(fs) <= 5 for fs in freq_sets)
          and 0.05 <= float(np.median(fracs)) <= 0.30 and med <= 1e-2)
    _verdict(12, "multi-scale-pruning", ok,
             f"freqs {freq_sets}, nn pruned "
             f"{['%.0f%%' % (100 * f) for f in fracs]}, median rel {med:.2e}",
             t0)


# --- 13. hybrid case and LS ablation ----------------------------------------------

def test_c13_hybrid_ls_ablation():
    t0 = time.perf_counter()
    problem = make_problem("poisson1d_hybrid")
    med = _medians(problem, ("fourier_pinn", "fourier_pinn_no_ls"),
                   SINGLE_SCALE)
    ok = (med["fourier_pinn"] <= 1e-2
          and med["fourier_pinn_no_ls"] >= 10 * med["fourier_pinn"])
    _verdict(13, "hybrid-ls-ablation", ok,
             f"with-LS median {med['fourier_pinn']:.2e} <= 1e-2, without-LS "
             f"{med['fourier_pinn_no_ls']:.2e} >= 10x", t0)


# --- 14. regularization/pruning ablation ordering ----------------------------------

def test_c14_ablation_ordering():
    # known red at float64 desk scale: with the truth exactly representable,
    # the unregularized pruned run isolates the true support and the trailing
    # LS is exact (~1e-14), so any alpha > 0 loses the first comparison; when
    # the bank excludes part of the truth the junk coefficients are too large
    # to prune and the prune arms equal the no-prune arms bitwise
    t0 = time.perf_counter()
    problem = make_problem("wave1d")
    med = {}
    for tag, (alpha, delta) in {"reg+prune": (1e-4, 1e-4),
                                "noreg+prune": (0.0, 1e-4),
                                "reg+noprune": (1e-4, 0.0),
                                "noreg+noprune": (0.0, 0.0)}.items():
        errs = [_train("fourier_pinn", problem, s, reg_strength=alpha,
                       prune_threshold=delta, **WAVE_ABLATION)[1].final_rel_l2
                for s in SEEDS]
        med[tag] = float(np.median(errs))
    ok = (med["reg+prune"] <= med["noreg+prune"]
          <= med["reg+noprune"] <= med["noreg+noprune"])
    _verdict(14, "ablation-ordering", ok,
             "medians " + " <= ".join(f"{k} {med[k]:.2e}" for k in
                                      ("reg+prune", "noreg+prune",
                                       "reg+noprune", "noreg+noprune")), t0)


# --- 15. 2D multi-scale --------------------------------------------------------------

def test_c15_poisson2d_multi_scale():
    t0 = time.perf_counter()
    problem = make_problem("poisson2d_combined")
    med = _medians(problem, ("fourier_pinn", "standard_pinn"), POISSON_2D)
    ok = med["fourier_pinn"] <= 1e-2 and med["standard_pinn"] >= 0.5
    _verdict(15, "poisson2d-multi-scale", ok,
             f"fourier median {med['fourier_pinn']:.2e} <= 1e-2, standard "
             f"median {med['standard_pinn']:.2e} >= 0.5", t0)


# --- 16. determinism -------------------------------------------------------------------

def _mask_wall_clock(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    col = rows[0].index("wall_clock_s")
    for row in rows[1:]:
        row[col] = "X"
    return rows


def test_c16_determinism(tmp_path):
    t0 = time.perf_counter()
    config = str(importlib.resources.files("pinnlab") / "configs/wave1d.ini")
    outs = [str(tmp_path / d) for d in ("a", "b")]
    for out in outs:
        rc = cli.main(["solve", config, "--out", out, "--seed-override", "0"])
        assert rc == 0
    same_hist = (open(f"{outs[0]}/history_0.csv", "rb").read()
                 == open(f"{outs[1]}/history_0.csv", "rb").read())
    same_spec = (open(f"{outs[0]}/spectrum_0.csv", "rb").read()
                 == open(f"{outs[1]}/spectrum_0.csv", "rb").read())
    same_report = (_mask_wall_clock(f"{outs[0]}/report.csv")
                   == _mask_wall_clock(f"{outs[1]}/report.csv"))
    ok = same_hist and same_spec and same_report
    _verdict(16, "determinism", ok,
             f"history identical {same_hist}, spectrum identical {same_spec},"
             f" report identical minus wall clock {same_report}", t0)
