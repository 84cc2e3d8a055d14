"""Benchmark PDE catalog: manufactured truths, analytically derived forcings,
boundary data, and collocation sampling.

Each case fixes a closed-form truth u*, applies its operator symbolically
(via sympy at construction time) to obtain the forcing, and exposes Dirichlet
data as the truth restricted to the box faces.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import sympy as sp

from .diffnet import JetBatch

TWO_PI = 2.0 * np.pi


@dataclass
class PdeProblem:
    name: str
    lo: np.ndarray
    hi: np.ndarray
    operator: str                 # "poisson" | "allen_cahn" | "wave"
    forcing: object               # callable (P,d)->(P,)
    boundary_data: object         # callable (P,d)->(P,)
    truth: object | None
    dirichlet_faces: list         # (axis, side) with side 0=lo, 1=hi
    params: dict

    @property
    def dim(self) -> int:
        return self.lo.size

    @property
    def is_linear(self) -> bool:
        return self.operator != "allen_cahn"

    def required_order(self) -> int:
        return 1 if self.operator == "wave" else 2


@dataclass
class CollocationSet:
    interior: np.ndarray   # (N, d)
    boundary: np.ndarray   # (M, d)
    scheme: str
    seed: int | None


def _lambdify(expr, syms):
    fn = sp.lambdify(syms, expr, modules="numpy")

    def call(points):
        pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
        out = fn(*[pts[:, i] for i in range(len(syms))])
        return np.broadcast_to(np.asarray(out, dtype=np.float64),
                               (pts.shape[0],)).copy()

    return call


def _apply_symbolic_operator(operator, u, syms):
    if operator == "poisson":
        return sum(sp.diff(u, s, 2) for s in syms)
    if operator == "allen_cahn":
        return sum(sp.diff(u, s, 2) for s in syms) + u * (u ** 2 - 1)
    if operator == "wave":
        x, t = syms
        return sp.diff(u, t) + 10 * sp.diff(u, x)
    raise ValueError(f"unknown operator {operator!r}")


def _truth_1d(case, k):
    x = sp.symbols("x")
    table = {
        "single": sp.sin(100 * x),
        "multi": sp.sin(x) + sp.Rational(1, 10) * sp.sin(20 * x)
        + sp.Rational(1, 20) * sp.cos(100 * x),
        "hybrid": sp.sin(6 * x) * sp.cos(100 * x),
        "sweep": sp.sin(k * x) if k is not None else None,
        "twotone": sp.sin(2 * x) + sp.sin(16 * x),
        "gaussmod": sp.exp(-x ** 2 / 2) * sp.sin(16 * x),
        "nonhomo": x ** 2 + sp.sin(16 * x),
    }
    return x, table[case]


CATALOG_1D = {
    "poisson1d_sweep": ("poisson", "sweep"),
    "poisson1d_single": ("poisson", "single"),
    "poisson1d_multi": ("poisson", "multi"),
    "poisson1d_hybrid": ("poisson", "hybrid"),
    "poisson1d_twotone": ("poisson", "twotone"),
    "poisson1d_gaussmod": ("poisson", "gaussmod"),
    "poisson1d_nonhomo": ("poisson", "nonhomo"),
    "allencahn1d_sweep": ("allen_cahn", "sweep"),
    "allencahn1d_single": ("allen_cahn", "single"),
    "allencahn1d_multi": ("allen_cahn", "multi"),
    "allencahn1d_hybrid": ("allen_cahn", "hybrid"),
}

CASE_NAMES = sorted(CATALOG_1D) + [
    "poisson2d_single", "poisson2d_combined", "allencahn2d_multi", "wave1d",
]

ANALYSIS_CASES = ("poisson1d_sweep", "poisson1d_twotone",
                  "poisson1d_gaussmod", "poisson1d_nonhomo")


def make_problem(case: str, params: dict | None = None) -> PdeProblem:
    params = dict(params or {})
    if case in CATALOG_1D:
        operator, shape = CATALOG_1D[case]
        k = params.get("k")
        if shape == "sweep" and k is None:
            raise ValueError(f"{case} requires a frequency parameter k")
        x, u = _truth_1d(shape, int(k) if k is not None else None)
        f = sp.simplify(_apply_symbolic_operator(operator, u, [x]))
        truth = _lambdify(u, [x])
        return PdeProblem(
            name=case, lo=np.array([0.0]), hi=np.array([TWO_PI]),
            operator=operator, forcing=_lambdify(f, [x]),
            boundary_data=truth, truth=truth,
            dirichlet_faces=[(0, 0), (0, 1)], params=params)
    if case in ("poisson2d_single", "poisson2d_combined", "allencahn2d_multi"):
        x, y = sp.symbols("x y")
        if case == "poisson2d_single":
            operator, u = "poisson", sp.sin(100 * x) * sp.sin(100 * y)
        elif case == "poisson2d_combined":
            operator = "poisson"
            u = sp.sin(6 * x) * sp.cos(20 * x) + sp.sin(6 * y) * sp.cos(20 * y)
        else:
            operator = "allen_cahn"
            g1 = sp.sin(x) + sp.Rational(1, 10) * sp.sin(20 * x) + sp.cos(100 * x)
            g2 = sp.sin(y) + sp.Rational(1, 10) * sp.sin(20 * y) + sp.cos(100 * y)
            u = g1 * g2
        f = _apply_symbolic_operator(operator, u, [x, y])
        truth = _lambdify(u, [x, y])
        return PdeProblem(
            name=case, lo=np.zeros(2), hi=np.array([TWO_PI, TWO_PI]),
            operator=operator, forcing=_lambdify(f, [x, y]),
            boundary_data=truth, truth=truth,
            dirichlet_faces=[(0, 0), (0, 1), (1, 0), (1, 1)], params=params)
    if case == "wave1d":
        x, t = sp.symbols("x t")
        u = (sp.sin(sp.pi * x) * sp.cos(10 * sp.pi * t)
             + sp.sin(2 * sp.pi * x) * sp.cos(20 * sp.pi * t))
        f = _apply_symbolic_operator("wave", u, [x, t])
        truth = _lambdify(u, [x, t])
        # time axis is treated as a second coordinate; the initial condition
        # is the t=0 face, the t=1 face carries no data
        return PdeProblem(
            name=case, lo=np.zeros(2), hi=np.ones(2), operator="wave",
            forcing=_lambdify(f, [x, t]), boundary_data=truth, truth=truth,
            dirichlet_faces=[(0, 0), (0, 1), (1, 0)], params=params)
    raise ValueError(
        f"unknown case {case!r}; registered cases: {', '.join(CASE_NAMES)}")


def apply_operator(problem: PdeProblem, jets: JetBatch):
    """Split evaluation (linear part, nonlinear part) of the operator."""
    if problem.operator == "poisson":
        return jets.second.sum(axis=1), np.zeros_like(jets.value)
    if problem.operator == "allen_cahn":
        u = jets.value
        return jets.second.sum(axis=1), u * (u * u - 1.0)
    if problem.operator == "wave":
        return jets.grad[:, 1] + 10.0 * jets.grad[:, 0], np.zeros_like(jets.value)
    raise ValueError(problem.operator)


def nonlinear_term(problem: PdeProblem, values: np.ndarray) -> np.ndarray:
    if problem.operator == "allen_cahn":
        return values * (values * values - 1.0)
    return np.zeros_like(values)


def residual(problem: PdeProblem, jets: JetBatch, points) -> np.ndarray:
    gu, su = apply_operator(problem, jets)
    return gu + su - problem.forcing(points)


def _face_points(problem, axis, side, count):
    d = problem.dim
    if d == 1:
        val = problem.lo[0] if side == 0 else problem.hi[0]
        return np.full((count, 1), val)
    pts = np.empty((count, d))
    other = 1 - axis
    pts[:, axis] = problem.lo[axis] if side == 0 else problem.hi[axis]
    pts[:, other] = np.linspace(problem.lo[other], problem.hi[other], count)
    return pts


def sample_collocation(problem: PdeProblem, n_interior: int, n_boundary: int,
                       scheme: str = "equispaced",
                       seed: int | None = 0) -> CollocationSet:
    if n_interior < 1 or n_boundary < 1:
        raise ValueError("counts must be >= 1")
    d = problem.dim
    if scheme == "equispaced":
        if d == 1:
            interior = np.linspace(problem.lo[0], problem.hi[0],
                                   n_interior)[:, None]
        else:
            m = int(np.ceil(np.sqrt(n_interior)))
            axes = [np.linspace(problem.lo[i], problem.hi[i], m + 2)[1:-1]
                    for i in range(d)]
            grid = np.meshgrid(*axes, indexing="ij")
            interior = np.stack([g.ravel() for g in grid], axis=1)[:n_interior]
    elif scheme == "uniform_random":
        rng = np.random.default_rng(seed)
        interior = rng.uniform(problem.lo, problem.hi, size=(n_interior, d))
    else:
        raise ValueError(f"unknown scheme {scheme!r}")
    faces = problem.dirichlet_faces
    per = [n_boundary // len(faces)] * len(faces)
    for i in range(n_boundary - sum(per)):
        per[i] += 1
    boundary = np.vstack([_face_points(problem, ax, side, max(c, 1))
                          for (ax, side), c in zip(faces, per)])
    return CollocationSet(interior=interior, boundary=boundary,
                          scheme=scheme, seed=seed)


def test_grid(problem: PdeProblem, n_points: int) -> np.ndarray:
    """Equispaced evaluation grid used for relative-l2 reporting."""
    d = problem.dim
    if d == 1:
        return np.linspace(problem.lo[0], problem.hi[0], n_points)[:, None]
    m = int(np.ceil(np.sqrt(n_points)))
    axes = [np.linspace(problem.lo[i], problem.hi[i], m) for i in range(d)]
    grid = np.meshgrid(*axes, indexing="ij")
    return np.stack([g.ravel() for g in grid], axis=1)
