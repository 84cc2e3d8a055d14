"""Second-order central-difference reference solver for the 1D steady cases.

Poisson solves the pinned tridiagonal system directly (Thomas algorithm);
the steady Allen-Cahn equation is handled by Newton iteration with the same
tridiagonal structure plus the diagonal reaction Jacobian.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .problems import PdeProblem


@dataclass
class Grid1D:
    nodes: np.ndarray

    @classmethod
    def regular(cls, lo: float, hi: float, n: int) -> "Grid1D":
        if n < 3:
            raise ValueError("need at least 3 nodes")
        return cls(np.linspace(lo, hi, n))

    @property
    def h(self) -> float:
        return float(self.nodes[1] - self.nodes[0])

    @property
    def n(self) -> int:
        return self.nodes.size


@dataclass
class FdmResult:
    solution: np.ndarray
    converged: bool = True
    newton_iters: int = 0
    final_residual: float = 0.0


def thomas_solve(lower, diag, upper, rhs):
    """Tridiagonal solve; bands are (n-1,), (n,), (n-1,)."""
    n = diag.size
    c = upper.astype(np.float64).copy()
    d = diag.astype(np.float64).copy()
    b = rhs.astype(np.float64).copy()
    for i in range(1, n):
        m = lower[i - 1] / d[i - 1]
        d[i] -= m * c[i - 1]
        b[i] -= m * b[i - 1]
    x = np.empty(n)
    x[-1] = b[-1] / d[-1]
    for i in range(n - 2, -1, -1):
        x[i] = (b[i] - c[i] * x[i + 1]) / d[i]
    return x


def _dirichlet_values(problem: PdeProblem, grid: Grid1D):
    g = problem.boundary_data
    return (float(g(np.array([[grid.nodes[0]]]))[0]),
            float(g(np.array([[grid.nodes[-1]]]))[0]))


def fdm_poisson(problem: PdeProblem, grid: Grid1D) -> FdmResult:
    """u_xx = f with pinned Dirichlet endpoints."""
    n, h = grid.n, grid.h
    ga, gb = _dirichlet_values(problem, grid)
    f = problem.forcing(grid.nodes[:, None])
    lower = np.full(n - 1, 1.0 / h ** 2)
    diag = np.full(n, -2.0 / h ** 2)
    upper = np.full(n - 1, 1.0 / h ** 2)
    rhs = f.copy()
    # pin boundary rows
    diag[0] = diag[-1] = 1.0
    upper[0] = lower[-1] = 0.0
    rhs[0], rhs[-1] = ga, gb
    u = thomas_solve(lower, diag, upper, rhs)
    return FdmResult(solution=u)


def _ac_residual(u, f, h, ga, gb):
    r = np.empty_like(u)
    r[0] = u[0] - ga
    r[-1] = u[-1] - gb
    r[1:-1] = (u[:-2] - 2 * u[1:-1] + u[2:]) / h ** 2 \
        + u[1:-1] * (u[1:-1] ** 2 - 1.0) - f[1:-1]
    return r


def fdm_allen_cahn(problem: PdeProblem, grid: Grid1D, max_newton: int = 100,
                   tol: float = 1e-10) -> FdmResult:
    """u_xx + u(u^2 - 1) = f by Newton iteration from the zero vector.

    If Newton fails to converge, retries once from the linear (Poisson)
    solution before returning a flagged result.
    """
    n, h = grid.n, grid.h
    ga, gb = _dirichlet_values(problem, grid)
    f = problem.forcing(grid.nodes[:, None])

    def run(u0):
        u = u0.copy()
        for it in range(1, max_newton + 1):
            r = _ac_residual(u, f, h, ga, gb)
            rn = float(np.max(np.abs(r)))
            if rn <= tol:
                return u, True, it, rn
            lower = np.full(n - 1, 1.0 / h ** 2)
            upper = np.full(n - 1, 1.0 / h ** 2)
            diag = -2.0 / h ** 2 + 3.0 * u ** 2 - 1.0
            diag[0] = diag[-1] = 1.0
            upper[0] = lower[-1] = 0.0
            u = u - thomas_solve(lower, diag, upper, r)
        r = _ac_residual(u, f, h, ga, gb)
        return u, False, max_newton, float(np.max(np.abs(r)))

    u, ok, it, rn = run(np.zeros(n))
    if not ok:
        u, ok, it, rn = run(fdm_poisson(problem, grid).solution)
    return FdmResult(solution=u, converged=ok, newton_iters=it,
                     final_residual=rn)
