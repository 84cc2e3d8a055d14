"""Strong boundary-condition machinery.

Distance functions vanish on every face of a rectilinear box so that the
surrogate lift + distance * network satisfies Dirichlet data exactly.  Two
forms: the fixed polynomial (x-a)(b-x) per axis and the adaptive exponential
(1 - exp(alpha_a (a-x))) (1 - exp(alpha_b (x-b))) with trainable steepness.
Also holds the closed-form Fourier coefficients of both shapes together with
trapezoid-quadrature companions; where closed form and quadrature disagree,
the quadrature value is the one downstream analysis consumes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .diffnet import JetBatch


@dataclass
class DistanceFn:
    kind: str                    # "poly" | "exp"
    lo: np.ndarray               # (d,)
    hi: np.ndarray               # (d,)
    steep_lo: np.ndarray | None = None   # alpha at each lower face (exp only)
    steep_hi: np.ndarray | None = None
    trainable: bool = False

    def __post_init__(self):
        self.lo = np.atleast_1d(np.asarray(self.lo, dtype=np.float64))
        self.hi = np.atleast_1d(np.asarray(self.hi, dtype=np.float64))
        if np.any(self.lo >= self.hi):
            raise ValueError("need lo < hi per axis")
        if self.kind == "exp":
            if self.steep_lo is None or self.steep_hi is None:
                raise ValueError("exp distance needs steepness per face")
            self.steep_lo = np.atleast_1d(np.asarray(self.steep_lo, float))
            self.steep_hi = np.atleast_1d(np.asarray(self.steep_hi, float))
            if np.any(self.steep_lo <= 0) or np.any(self.steep_hi <= 0):
                raise ValueError("steepness must be positive")
        elif self.kind != "poly":
            raise ValueError(f"unknown distance kind {self.kind!r}")

    @property
    def dim(self) -> int:
        return self.lo.size


def _axis_factors(d: DistanceFn, x):
    """Per-axis factor value and its first/second derivative, each (P, dim)."""
    lo, hi = d.lo[None, :], d.hi[None, :]
    if d.kind == "poly":
        f = (x - lo) * (hi - x)
        f1 = lo + hi - 2.0 * x
        f2 = np.full_like(x, -2.0)
        return f, f1, f2
    aa = d.steep_lo[None, :]
    ab = d.steep_hi[None, :]
    ea = np.exp(aa * (lo - x))
    eb = np.exp(ab * (x - hi))
    ga, gb = 1.0 - ea, 1.0 - eb
    ga1, gb1 = aa * ea, -ab * eb
    ga2, gb2 = -aa * aa * ea, -ab * ab * eb
    f = ga * gb
    f1 = ga1 * gb + ga * gb1
    f2 = ga2 * gb + 2.0 * ga1 * gb1 + ga * gb2
    return f, f1, f2


def distance_jet(d: DistanceFn, points, order=2) -> JetBatch:
    """Value plus per-axis first/pure-second derivatives of the product form."""
    x = np.atleast_2d(np.asarray(points, dtype=np.float64))
    if x.shape[1] != d.dim:
        raise ValueError("point dimension mismatch")
    f, f1, f2 = _axis_factors(d, x)
    value = np.prod(f, axis=1)
    p, dim = x.shape
    grad = np.empty((p, dim))
    second = np.empty((p, dim))
    for i in range(dim):
        others = np.prod(np.delete(f, i, axis=1), axis=1)
        grad[:, i] = f1[:, i] * others
        second[:, i] = f2[:, i] * others
    return JetBatch(value, grad, second)


def distance_steepness_jets(d: DistanceFn, points):
    """d/d(alpha) of the distance jet, one JetBatch per steepness parameter.

    Parameters are ordered (steep_lo[0], steep_hi[0], steep_lo[1], ...).
    Used when the exponential steepness is optimized jointly with the net.
    """
    if d.kind != "exp":
        raise ValueError("steepness jets only exist for the exp form")
    x = np.atleast_2d(np.asarray(points, dtype=np.float64))
    p, dim = x.shape
    lo, hi = d.lo[None, :], d.hi[None, :]
    aa, ab = d.steep_lo[None, :], d.steep_hi[None, :]
    ea = np.exp(aa * (lo - x))
    eb = np.exp(ab * (x - hi))
    ga, gb = 1.0 - ea, 1.0 - eb
    ga1, gb1 = aa * ea, -ab * eb
    ga2, gb2 = -aa * aa * ea, -ab * ab * eb
    # partials of the axis factors with respect to their own alpha
    dga = -(lo - x) * ea
    dga1 = ea + aa * (lo - x) * ea
    dga2 = -2.0 * aa * ea - aa * aa * (lo - x) * ea
    dgb = -(x - hi) * eb
    dgb1 = -eb - ab * (x - hi) * eb
    dgb2 = -2.0 * ab * eb - ab * ab * (x - hi) * eb

    f = ga * gb
    f1 = ga1 * gb + ga * gb1
    f2 = ga2 * gb + 2.0 * ga1 * gb1 + ga * gb2

    out = []
    for i in range(dim):
        others = np.prod(np.delete(f, i, axis=1), axis=1)
        for which in ("lo", "hi"):
            if which == "lo":
                df = dga[:, i] * gb[:, i]
                df1 = dga1[:, i] * gb[:, i] + dga[:, i] * gb1[:, i]
                df2 = (dga2[:, i] * gb[:, i] + 2.0 * dga1[:, i] * gb1[:, i]
                       + dga[:, i] * gb2[:, i])
            else:
                df = ga[:, i] * dgb[:, i]
                df1 = ga1[:, i] * dgb[:, i] + ga[:, i] * dgb1[:, i]
                df2 = (ga2[:, i] * dgb[:, i] + 2.0 * ga1[:, i] * dgb1[:, i]
                       + ga[:, i] * dgb2[:, i])
            dvalue = df * others
            dgrad = np.zeros((p, dim))
            dsecond = np.zeros((p, dim))
            for k in range(dim):
                if k == i:
                    dgrad[:, k] = df1 * others
                    dsecond[:, k] = df2 * others
                else:
                    rest = np.prod(np.delete(np.delete(f, max(i, k), axis=1),
                                             min(i, k), axis=1), axis=1)
                    dgrad[:, k] = f1[:, k] * df * rest
                    dsecond[:, k] = f2[:, k] * df * rest
            out.append(JetBatch(dvalue, dgrad, dsecond))
    return out


def strong_eval(lift_jets: JetBatch | None, dist_jets: JetBatch,
                net_jets: JetBatch) -> JetBatch:
    """Jets of u = lift + distance * net, assembled by product/sum rules."""
    phi, net = dist_jets, net_jets
    value = phi.value * net.value
    grad = phi.grad * net.value[:, None] + phi.value[:, None] * net.grad
    second = (phi.second * net.value[:, None]
              + 2.0 * phi.grad * net.grad
              + phi.value[:, None] * net.second)
    out = JetBatch(value, grad, second)
    if lift_jets is not None:
        out = out + lift_jets
    return out


# ---------------------------------------------------------------------------
# Fourier coefficients of the two distance shapes on [0, 2*pi]
# ---------------------------------------------------------------------------

def phi_hat_poly(n: int) -> float:
    """Closed-form coefficient of x(2*pi - x): -2/n^2 for n != 0."""
    if n == 0:
        # the mean term has no closed form here; integrate instead
        return phi_hat_poly_quad(0)
    return -2.0 / (n * n)


def phi_hat_exp(n: int, alpha: float) -> float:
    """Closed-form Lorentzian-decay coefficient of the exponential shape.

    A quadrature companion (:func:`phi_hat_exp_quad`) is always computable;
    downstream convolution checks consume the quadrature value.
    """
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    return float(alpha * (1.0 - np.exp(2.0 * np.pi * alpha))
                 * np.exp(-2.0 * np.pi * alpha)
                 / (np.pi * (alpha * alpha + n * n)))


def _trapezoid_coeff(fvals, x, n):
    L = x[-1] - x[0]
    integrand = fvals * np.exp(-1j * 2.0 * np.pi * n * x / L)
    return np.trapezoid(integrand, x) / L


def phi_hat_poly_quad(n: int, nodes: int = 200_001) -> float:
    x = np.linspace(0.0, 2.0 * np.pi, nodes)
    c = _trapezoid_coeff(x * (2.0 * np.pi - x), x, n)
    return float(c.real)


def phi_hat_exp_quad(n: int, alpha: float, nodes: int = 200_001) -> complex:
    x = np.linspace(0.0, 2.0 * np.pi, nodes)
    f = (1.0 - np.exp(-alpha * x)) * (1.0 - np.exp(alpha * (x - 2.0 * np.pi)))
    return complex(_trapezoid_coeff(f, x, n))
