"""Dense QR and regularized least squares.

Householder QR without pivoting on the fast path; column-pivoted QR only in
the rank-deficient fallback of :func:`ridge_solve`.  Everything runs in
float64 with a fixed reduction order so repeated solves of the same problem
are bit-identical.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

RANK_TOL = 1e-12


@dataclass(frozen=True)
class RidgeProblem:
    """min_w ||design @ w - targets||^2 + reg_strength * ||w||^2"""

    design: np.ndarray
    targets: np.ndarray
    reg_strength: float

    def __post_init__(self):
        a = np.asarray(self.design, dtype=np.float64)
        y = np.asarray(self.targets, dtype=np.float64)
        if a.ndim != 2:
            raise ValueError("design must be a 2-D matrix")
        if y.shape != (a.shape[0],):
            raise ValueError("targets length must equal design rows")
        if not np.all(np.isfinite(a)) or not np.all(np.isfinite(y)):
            raise ValueError("non-finite entries in ridge problem")
        if self.reg_strength < 0:
            raise ValueError("reg_strength must be nonnegative")
        object.__setattr__(self, "design", a)
        object.__setattr__(self, "targets", y)


@dataclass
class QRResult:
    q: np.ndarray
    r: np.ndarray
    rank: int
    rank_deficient: bool


@dataclass
class RidgeSolution:
    coeffs: np.ndarray
    rank: int
    rank_deficient: bool = False
    min_norm_fallback: bool = False


def _householder_reduce(a, rhs=None):
    """In-place Householder triangularization of ``a`` (m x n, m >= n).

    Stores the reflector vectors in the strict lower triangle plus a separate
    scale array; applies the same reflectors to ``rhs`` if given.  Returns the
    packed factor and the reflector norms needed to rebuild Q.
    """
    m, n = a.shape
    vs = []
    for k in range(n):
        x = a[k:, k]
        normx = np.sqrt(np.dot(x, x))
        if normx == 0.0:
            vs.append(None)
            continue
        alpha = -normx if x[0] >= 0 else normx
        v = x.copy()
        v[0] -= alpha
        vnorm = np.sqrt(np.dot(v, v))
        if vnorm == 0.0:
            vs.append(None)
            continue
        v /= vnorm
        a[k:, k:] -= 2.0 * np.outer(v, v @ a[k:, k:])
        if rhs is not None:
            rhs[k:] -= 2.0 * v * np.dot(v, rhs[k:])
        vs.append(v)
    return vs


def _form_q(vs, m, n):
    q = np.zeros((m, n))
    q[:n, :n] = np.eye(n)
    for k in range(n - 1, -1, -1):
        v = vs[k]
        if v is None:
            continue
        q[k:, :] -= 2.0 * np.outer(v, v @ q[k:, :])
    return q


def qr_decompose(a) -> QRResult:
    """Thin Householder QR: a = q @ r with orthonormal q columns.

    Rank deficiency (a diagonal of r falling below ``RANK_TOL`` relative to
    the largest) is flagged, not raised; the caller decides.
    """
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] < a.shape[1]:
        raise ValueError("qr_decompose requires a tall matrix (rows >= cols)")
    if not np.all(np.isfinite(a)):
        raise ValueError("non-finite entries")
    m, n = a.shape
    work = a.copy()
    vs = _householder_reduce(work)
    r = np.triu(work[:n, :])
    q = _form_q(vs, m, n)
    diag = np.abs(np.diag(r))
    scale = diag.max() if n else 0.0
    rank = int(np.sum(diag > RANK_TOL * max(scale, 1.0)))
    return QRResult(q=q, r=r, rank=rank, rank_deficient=rank < n)


def solve_upper(r, b):
    """Back substitution for an upper-triangular system."""
    n = r.shape[0]
    x = np.zeros(n)
    for i in range(n - 1, -1, -1):
        x[i] = (b[i] - np.dot(r[i, i + 1:], x[i + 1:])) / r[i, i]
    return x


def _gauss_solve(a, b):
    """Gaussian elimination with partial pivoting (small dense systems)."""
    a = a.astype(np.float64).copy()
    b = b.astype(np.float64).copy()
    n = a.shape[0]
    for k in range(n):
        piv = k + int(np.argmax(np.abs(a[k:, k])))
        if piv != k:
            a[[k, piv]] = a[[piv, k]]
            b[[k, piv]] = b[[piv, k]]
        if a[k, k] == 0.0:
            raise np.linalg.LinAlgError("singular system")
        fac = a[k + 1:, k] / a[k, k]
        a[k + 1:, k:] -= np.outer(fac, a[k, k:])
        b[k + 1:] -= fac * b[k]
    return solve_upper(np.triu(a), b)


def _pivoted_min_norm(a, y):
    """Minimum-norm least-squares solution via column-pivoted Householder QR."""
    m, n = a.shape
    work = a.copy()
    rhs = y.copy()
    perm = np.arange(n)
    norms = np.sum(work * work, axis=0)
    for k in range(min(m, n)):
        j = k + int(np.argmax(norms[k:]))
        if j != k:
            work[:, [k, j]] = work[:, [j, k]]
            perm[[k, j]] = perm[[j, k]]
            norms[[k, j]] = norms[[j, k]]
        x = work[k:, k]
        normx = np.sqrt(np.dot(x, x))
        if normx > 0.0:
            alpha = -normx if x[0] >= 0 else normx
            v = x.copy()
            v[0] -= alpha
            vnorm = np.sqrt(np.dot(v, v))
            if vnorm > 0.0:
                v /= vnorm
                work[k:, k:] -= 2.0 * np.outer(v, v @ work[k:, k:])
                rhs[k:] -= 2.0 * v * np.dot(v, rhs[k:])
        norms[k + 1:] = np.sum(work[k + 1:, k + 1:] ** 2, axis=0)
    r = np.triu(work[: min(m, n), :])
    diag = np.abs(np.diag(r))
    scale = diag.max() if diag.size else 0.0
    rank = int(np.sum(diag > RANK_TOL * max(scale, 1.0)))
    r11 = r[:rank, :rank]
    r12 = r[:rank, rank:n]
    c1 = rhs[:rank]
    if rank == n:
        w_p = solve_upper(r11, c1)
    else:
        # w1 = r11^-1 (c1 - r12 w2); minimize ||w1||^2 + ||w2||^2 over w2
        d = solve_upper(r11, c1)
        mmat = np.column_stack([solve_upper(r11, r12[:, j]) for j in range(n - rank)])
        w2 = _gauss_solve(mmat.T @ mmat + np.eye(n - rank), mmat.T @ d)
        w1 = d - mmat @ w2
        w_p = np.concatenate([w1, w2])
    w = np.zeros(n)
    w[perm] = w_p
    return w, rank


def ridge_solve(problem: RidgeProblem) -> RidgeSolution:
    """Solve the ridge problem by QR on the stacked system [A; sqrt(reg) I].

    With reg_strength == 0 and a rank-deficient design, falls back to a
    pivoted minimum-norm solve and flags the result.
    """
    a = problem.design
    y = problem.targets
    alpha = float(problem.reg_strength)
    m, n = a.shape
    if alpha > 0.0:
        aug = np.vstack([a, np.sqrt(alpha) * np.eye(n)])
        rhs = np.concatenate([y, np.zeros(n)])
        work = aug
        _householder_reduce(work, rhs)
        r = np.triu(work[:n, :])
        # the augmented matrix always has full column rank for alpha > 0
        w = solve_upper(r, rhs[:n])
        return RidgeSolution(coeffs=w, rank=n)
    if m < n:
        w, rank = _pivoted_min_norm(a, y)
        return RidgeSolution(coeffs=w, rank=rank, rank_deficient=True,
                             min_norm_fallback=True)
    work = a.copy()
    rhs = y.copy()
    vs = _householder_reduce(work, rhs)
    r = np.triu(work[:n, :])
    diag = np.abs(np.diag(r))
    scale = diag.max() if n else 0.0
    rank = int(np.sum(diag > RANK_TOL * max(scale, 1.0)))
    if rank < n:
        w, rank = _pivoted_min_norm(a, y)
        return RidgeSolution(coeffs=w, rank=rank, rank_deficient=True,
                             min_norm_fallback=True)
    w = solve_upper(r, rhs[:n])
    return RidgeSolution(coeffs=w, rank=rank)


def stationarity_residual(problem: RidgeProblem, w: np.ndarray) -> float:
    """Infinity norm of the ridge normal-equation residual at w."""
    a, y, alpha = problem.design, problem.targets, problem.reg_strength
    g = a.T @ (a @ w - y) + alpha * w
    return float(np.max(np.abs(g))) if g.size else 0.0
