"""Trainable Fourier basis layers: 1D banks, 2D tensor products, pruning,
and the random-Fourier-feature embedding.

Frequency convention: basis n over a domain of length L has phase
theta_n(x) = 2*pi*n*x/L, so integer frequencies are exactly periodic over
the domain.  On [0, 2*pi] this reduces to cos(n x) / sin(n x).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .diffnet import JetBatch
from .kernels import trig_table


@dataclass
class FourierLayer1D:
    domain_length: float
    freqs: np.ndarray        # strictly increasing positive ints
    cos_coeffs: np.ndarray
    sin_coeffs: np.ndarray

    def __post_init__(self):
        self.freqs = np.asarray(self.freqs, dtype=np.int64)
        if self.freqs.size and (np.any(np.diff(self.freqs) <= 0)
                                or self.freqs[0] < 1):
            raise ValueError("frequencies must be strictly increasing, >= 1")
        if (self.cos_coeffs.shape != self.freqs.shape
                or self.sin_coeffs.shape != self.freqs.shape):
            raise ValueError("coefficient lists must match frequencies")
        if self.domain_length <= 0:
            raise ValueError("domain length must be positive")

    @property
    def n_active(self) -> int:
        return self.freqs.size

    def coeff_vector(self) -> np.ndarray:
        """Stacked [cos coeffs, sin coeffs]."""
        return np.concatenate([self.cos_coeffs, self.sin_coeffs])

    def with_coeffs(self, vec: np.ndarray) -> "FourierLayer1D":
        k = self.n_active
        return FourierLayer1D(self.domain_length, self.freqs.copy(),
                              vec[:k].copy(), vec[k:].copy())


def make_candidates(k_max: int, domain_length: float) -> FourierLayer1D:
    """All integer frequencies 1..k_max with zero coefficients."""
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    freqs = np.arange(1, k_max + 1)
    z = np.zeros(k_max)
    return FourierLayer1D(domain_length, freqs, z.copy(), z.copy())


def basis_tables_1d(layer: FourierLayer1D, points):
    """(value, d/dx, d2/dx2) tables, shape (P, 2K): cos block then sin block."""
    x = np.asarray(points, dtype=np.float64).reshape(-1)
    w = 2.0 * np.pi * layer.freqs / layer.domain_length
    theta = x[:, None] * w[None, :]
    c, s = trig_table(theta)
    val = np.hstack([c, s])
    d1 = np.hstack([-w * s, w * c])
    d2 = np.hstack([-(w * w) * c, -(w * w) * s])
    return val, d1, d2


def eval_fourier_jets(layer: FourierLayer1D, points, order=2):
    """Combined jet of the layer output plus the per-basis tables."""
    if order not in (0, 1, 2):
        raise ValueError("order must be 0, 1 or 2")
    val, d1, d2 = basis_tables_1d(layer, points)
    w = layer.coeff_vector()
    combined = JetBatch(val @ w, (d1 @ w)[:, None], (d2 @ w)[:, None])
    return combined, (val, d1, d2)


@dataclass
class FourierLayer2D:
    """Tensor-product layer over per-axis features [1, cos_1, sin_1, ...].

    The constant feature makes purely additive 2D targets (f(x) + g(y))
    representable; without it every term would be a cross product of two
    oscillatory factors.
    """

    domain_lengths: tuple
    freqs_x: np.ndarray
    freqs_y: np.ndarray
    beta: np.ndarray     # length (2*Kx+1) * (2*Ky+1), row-major over (x-feature, y-feature)

    def __post_init__(self):
        self.freqs_x = np.asarray(self.freqs_x, dtype=np.int64)
        self.freqs_y = np.asarray(self.freqs_y, dtype=np.int64)
        nb = (2 * self.freqs_x.size + 1) * (2 * self.freqs_y.size + 1)
        if self.beta.shape != (nb,):
            raise ValueError("beta length must be (2Kx+1)*(2Ky+1)")

    @property
    def shape(self):
        return (2 * self.freqs_x.size + 1, 2 * self.freqs_y.size + 1)

    def beta_matrix(self) -> np.ndarray:
        return self.beta.reshape(self.shape)


def make_candidates_2d(k_max, domain_lengths) -> FourierLayer2D:
    kx, ky = (k_max, k_max) if np.isscalar(k_max) else k_max
    fx = np.arange(1, kx + 1)
    fy = np.arange(1, ky + 1)
    beta = np.zeros((2 * kx + 1) * (2 * ky + 1))
    return FourierLayer2D(tuple(domain_lengths), fx, fy, beta)


def axis_tables(domain_length, freqs, x):
    """Per-axis features [1, cos_1, sin_1, ..., cos_K, sin_K]."""
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    w = 2.0 * np.pi * np.asarray(freqs, dtype=np.float64) / domain_length
    theta = x[:, None] * w[None, :]
    c, s = trig_table(theta)
    p, k = theta.shape
    val = np.zeros((p, 2 * k + 1))
    d1 = np.zeros((p, 2 * k + 1))
    d2 = np.zeros((p, 2 * k + 1))
    val[:, 0] = 1.0
    val[:, 1::2], val[:, 2::2] = c, s
    d1[:, 1::2], d1[:, 2::2] = -w * s, w * c
    d2[:, 1::2], d2[:, 2::2] = -(w * w) * c, -(w * w) * s
    return val, d1, d2


def pair_block(fx, fy):
    """Row-wise outer product of per-axis feature tables, flattened row-major."""
    p = fx.shape[0]
    return (fx[:, :, None] * fy[:, None, :]).reshape(p, -1)


def eval_tensor_jets(layer: FourierLayer2D, points, order=2) -> JetBatch:
    pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
    if pts.shape[1] != 2:
        raise ValueError("tensor-product layer expects 2-D points")
    lx, ly = layer.domain_lengths
    v1, g1, s1 = axis_tables(lx, layer.freqs_x, pts[:, 0])
    v2, g2, s2 = axis_tables(ly, layer.freqs_y, pts[:, 1])
    b = layer.beta_matrix()
    value = np.einsum("pi,pi->p", v1 @ b, v2)
    dx = np.einsum("pi,pi->p", g1 @ b, v2)
    dy = np.einsum("pi,pi->p", v1 @ b, g2)
    dxx = np.einsum("pi,pi->p", s1 @ b, v2)
    dyy = np.einsum("pi,pi->p", v1 @ b, s2)
    return JetBatch(value, np.stack([dx, dy], axis=1),
                    np.stack([dxx, dyy], axis=1))


@dataclass
class PruneReport:
    removed: list
    kept: list


def prune_bases(layer, magnitudes, delta):
    """Drop frequencies whose coefficient magnitude falls below delta.

    For the 1D layer ``magnitudes`` is per frequency (max of |a_n|, |b_n|);
    for the 2D layer it is a pair of per-axis magnitude arrays (max |beta|
    over the frequency's cos/sin rows or columns).
    """
    if delta < 0:
        raise ValueError("delta must be nonnegative")
    if isinstance(layer, FourierLayer1D):
        magnitudes = np.asarray(magnitudes, dtype=np.float64)
        keep = magnitudes >= delta
        report = PruneReport(removed=list(layer.freqs[~keep]),
                             kept=list(layer.freqs[keep]))
        new = FourierLayer1D(layer.domain_length, layer.freqs[keep],
                             layer.cos_coeffs[keep], layer.sin_coeffs[keep])
        return new, report
    mx, my = magnitudes
    keep_x = np.asarray(mx) >= delta
    keep_y = np.asarray(my) >= delta
    b = layer.beta_matrix()
    # the constant feature of each axis is never pruned
    row_keep = np.concatenate([[True], np.repeat(keep_x, 2)])
    col_keep = np.concatenate([[True], np.repeat(keep_y, 2)])
    new_b = b[np.ix_(row_keep, col_keep)].reshape(-1)
    report = PruneReport(
        removed=[("x", int(f)) for f in layer.freqs_x[~keep_x]]
        + [("y", int(f)) for f in layer.freqs_y[~keep_y]],
        kept=[("x", int(f)) for f in layer.freqs_x[keep_x]]
        + [("y", int(f)) for f in layer.freqs_y[keep_y]],
    )
    new = FourierLayer2D(layer.domain_lengths, layer.freqs_x[keep_x],
                         layer.freqs_y[keep_y], new_b)
    return new, report


def coeff_magnitudes(layer):
    """Per-frequency coefficient magnitudes used as the pruning signal."""
    if isinstance(layer, FourierLayer1D):
        return np.maximum(np.abs(layer.cos_coeffs), np.abs(layer.sin_coeffs))
    b = np.abs(layer.beta_matrix())
    kx = layer.freqs_x.size
    ky = layer.freqs_y.size
    mx = b[1:, :].reshape(kx, 2, 2 * ky + 1).max(axis=(1, 2))
    my = b[:, 1:].reshape(2 * kx + 1, ky, 2).max(axis=(0, 2))
    return mx, my


# ---------------------------------------------------------------------------
# random Fourier features
# ---------------------------------------------------------------------------

@dataclass
class RffEmbedding:
    sampled_freqs: np.ndarray   # (features, input_dim)
    scales: list
    seed: int

    @property
    def n_features(self) -> int:
        return 2 * self.sampled_freqs.shape[0]


def sample_rff(scales, features_per_scale, input_dim, seed) -> RffEmbedding:
    """Gaussian frequency rows, one block per scale; deterministic per seed."""
    scales = list(scales)
    if not scales:
        raise ValueError("scales must be nonempty")
    if any(s <= 0 for s in scales):
        raise ValueError("scales must be positive")
    if features_per_scale < 1:
        raise ValueError("features_per_scale must be >= 1")
    rng = np.random.default_rng(seed)
    blocks = [rng.normal(0.0, s, size=(features_per_scale, input_dim))
              for s in scales]
    return RffEmbedding(np.vstack(blocks), scales, seed)


def rff_jets(emb: RffEmbedding, points):
    """Feature jets x -> [cos(2 pi r.x), sin(2 pi r.x)] with analytic derivatives.

    Returns (value, grad, second) shaped for use as network seed jets.
    """
    x = np.atleast_2d(np.asarray(points, dtype=np.float64))
    r = emb.sampled_freqs              # (F, d)
    theta = 2.0 * np.pi * (x @ r.T)    # (P, F)
    c, s = trig_table(theta)
    w = 2.0 * np.pi * r.T              # (d, F)
    value = np.hstack([c, s])
    p, d = x.shape
    grad = np.empty((p, d, value.shape[1]))
    second = np.empty_like(grad)
    for i in range(d):
        grad[:, i, :] = np.hstack([-w[i] * s, w[i] * c])
        second[:, i, :] = np.hstack([-(w[i] ** 2) * c, -(w[i] ** 2) * s])
    return value, grad, second
