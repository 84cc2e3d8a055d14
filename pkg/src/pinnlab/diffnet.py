"""Fully-connected network with analytic propagation of derivative jets.

A jet bundles (value, first derivatives, pure second derivatives) per input
axis.  Jets are pushed forward exactly through each affine layer and tanh
activation, giving the network value together with u_x and u_xx (per axis)
without finite differencing.  Parameter gradients of any weighted sum of jet
components are computed by a hand-written reverse pass through the same
propagation.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from . import kernels

ACTIVATIONS = ("tanh", "adaptive_tanh", "identity")


@dataclass
class JetBatch:
    """Per-point (value, grad, pure second) of a scalar field over D inputs."""

    value: np.ndarray   # (P,)
    grad: np.ndarray    # (P, D)
    second: np.ndarray  # (P, D)

    def __add__(self, other):
        return JetBatch(self.value + other.value, self.grad + other.grad,
                        self.second + other.second)


@dataclass
class MlpParams:
    weights: list          # per hidden layer, (out, in)
    biases: list           # per hidden layer, (out,)
    coeffs: np.ndarray     # last-layer combination, (W,)
    activation: str = "tanh"
    slopes: np.ndarray | None = None   # one per hidden layer (adaptive_tanh)
    active: np.ndarray | None = None   # mask over last-layer bases

    def __post_init__(self):
        if self.activation not in ACTIVATIONS:
            raise ValueError(f"unknown activation {self.activation!r}")
        if (self.slopes is not None) != (self.activation == "adaptive_tanh"):
            raise ValueError("slopes present iff activation is adaptive_tanh")
        if self.slopes is not None and np.any(self.slopes <= 0):
            raise ValueError("adaptive slopes must be positive")
        for wa, wb in zip(self.weights[:-1], self.weights[1:]):
            if wb.shape[1] != wa.shape[0]:
                raise ValueError("layer shapes do not compose")
        if self.coeffs.shape != (self.weights[-1].shape[0],):
            raise ValueError("coeffs length must equal final hidden width")
        if self.active is None:
            self.active = np.ones(self.coeffs.shape[0], dtype=bool)

    @property
    def width(self) -> int:
        return self.coeffs.shape[0]

    @property
    def in_dim(self) -> int:
        return self.weights[0].shape[1]

    def copy(self) -> "MlpParams":
        return MlpParams(
            weights=[w.copy() for w in self.weights],
            biases=[b.copy() for b in self.biases],
            coeffs=self.coeffs.copy(),
            activation=self.activation,
            slopes=None if self.slopes is None else self.slopes.copy(),
            active=self.active.copy(),
        )


@dataclass
class BasisJets:
    """Jets of every hidden basis plus the combined output."""

    psi_value: np.ndarray    # (P, W)
    psi_grad: np.ndarray     # (P, D, W)
    psi_second: np.ndarray   # (P, D, W)
    combined: JetBatch


def init_params(widths, seed, activation="tanh") -> MlpParams:
    """Glorot-uniform weights, zero biases; deterministic per seed.

    ``widths`` runs input -> hidden... -> 1; the final 1-wide layer supplies
    the combination coefficients.
    """
    widths = list(widths)
    if len(widths) < 2 or any(w <= 0 for w in widths):
        raise ValueError("widths needs >= 2 positive entries")
    if widths[-1] != 1:
        raise ValueError("output width must be 1")
    rng = np.random.default_rng(seed)
    weights, biases = [], []
    for fan_in, fan_out in zip(widths[:-2], widths[1:-1]):
        s = np.sqrt(6.0 / (fan_in + fan_out))
        weights.append(rng.uniform(-s, s, size=(fan_out, fan_in)))
        biases.append(np.zeros(fan_out))
    w = widths[-2]
    s = np.sqrt(6.0 / (w + 1))
    coeffs = rng.uniform(-s, s, size=w)
    slopes = np.ones(len(weights)) if activation == "adaptive_tanh" else None
    return MlpParams(weights=weights, biases=biases, coeffs=coeffs,
                     activation=activation, slopes=slopes)


def input_jets(points) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Seed jets for raw coordinates: dx_i/dx_j = delta_ij, seconds zero."""
    x = np.atleast_2d(np.asarray(points, dtype=np.float64))
    p, d = x.shape
    g = np.broadcast_to(np.eye(d), (p, d, d)).copy()
    s = np.zeros((p, d, d))
    return x, g, s


def _forward(params: MlpParams, h, hg, hs, keep_cache=False):
    cache = [] if keep_cache else None
    for ell, (w, b) in enumerate(zip(params.weights, params.biases)):
        z = h @ w.T + b
        zg = hg @ w.T
        zs = hs @ w.T
        if keep_cache:
            cache.append({"h": h, "hg": hg, "hs": hs, "z": z, "zg": zg, "zs": zs})
        if params.activation == "identity":
            h, hg, hs, t = z, zg, zs, z
        else:
            slope = 1.0 if params.slopes is None else params.slopes[ell]
            h, hg, hs, t = kernels.act_tanh_forward(z, zg, zs, slope)
        if keep_cache:
            cache[-1]["t"] = t
    return h, hg, hs, cache


def eval_jets(params: MlpParams, points, order=2, seed_jets=None) -> BasisJets:
    """Jets of each basis psi_j and of the combined output sum_j c_j psi_j.

    ``seed_jets`` optionally replaces the raw-coordinate input jets, e.g. with
    feature-embedding jets; it is a (value, grad, second) triple.
    """
    if order not in (0, 1, 2):
        raise ValueError("order must be 0, 1 or 2")
    if order == 2 and params.activation not in ("tanh", "adaptive_tanh", "identity"):
        raise ValueError("order 2 requires a twice-differentiable activation")
    h0, g0, s0 = input_jets(points) if seed_jets is None else seed_jets
    if h0.shape[1] != params.in_dim:
        raise ValueError("point dimension does not match first layer")
    psi, psig, psis, _ = _forward(params, h0, g0, s0)
    ca = params.coeffs * params.active
    combined = JetBatch(psi @ ca, psig @ ca, psis @ ca)
    return BasisJets(psi_value=psi, psi_grad=psig, psi_second=psis,
                     combined=combined)


# ---------------------------------------------------------------------------
# flat parameter vector
# ---------------------------------------------------------------------------

def pack_params(params: MlpParams) -> np.ndarray:
    parts = []
    for w, b in zip(params.weights, params.biases):
        parts.append(w.ravel())
        parts.append(b)
    if params.slopes is not None:
        parts.append(params.slopes)
    parts.append(params.coeffs)
    return np.concatenate(parts)


def unpack_params(template: MlpParams, vec: np.ndarray) -> MlpParams:
    out = template.copy()
    i = 0
    for ell, (w, b) in enumerate(zip(template.weights, template.biases)):
        out.weights[ell] = vec[i:i + w.size].reshape(w.shape)
        i += w.size
        out.biases[ell] = vec[i:i + b.size].copy()
        i += b.size
    if template.slopes is not None:
        out.slopes = vec[i:i + template.slopes.size].copy()
        i += template.slopes.size
    out.coeffs = vec[i:i + template.coeffs.size].copy()
    i += template.coeffs.size
    if i != vec.size:
        raise ValueError("flat vector length mismatch")
    return out


def n_params(params: MlpParams) -> int:
    n = sum(w.size + b.size for w, b in zip(params.weights, params.biases))
    if params.slopes is not None:
        n += params.slopes.size
    return n + params.coeffs.size


def param_gradient(params: MlpParams, points, adjoints: JetBatch,
                   seed_jets=None) -> np.ndarray:
    """Gradient of sum_p [adj.value*u + adj.grad.u_x + adj.second.u_xx].

    Exact reverse mode through the jet propagation; returns a flat vector in
    the :func:`pack_params` layout.
    """
    h0, g0, s0 = input_jets(points) if seed_jets is None else seed_jets
    p, d = h0.shape[0], g0.shape[1]
    av = np.asarray(adjoints.value, dtype=np.float64)
    ag = np.asarray(adjoints.grad, dtype=np.float64)
    asec = np.asarray(adjoints.second, dtype=np.float64)
    if av.shape != (p,) or ag.shape != (p, d) or asec.shape != (p, d):
        raise ValueError("adjoint shapes do not match points")
    if not (np.all(np.isfinite(av)) and np.all(np.isfinite(ag))
            and np.all(np.isfinite(asec))):
        raise ValueError("non-finite adjoints")

    psi, psig, psis, cache = _forward(params, h0, g0, s0, keep_cache=True)
    ca = params.coeffs * params.active

    c_grad = psi.T @ av + np.einsum("pdw,pd->w", psig, ag) \
        + np.einsum("pdw,pd->w", psis, asec)
    c_grad *= params.active

    hbar = av[:, None] * ca[None, :]
    gbar = ag[:, :, None] * ca[None, None, :]
    sbar = asec[:, :, None] * ca[None, None, :]

    w_grads = [None] * len(params.weights)
    b_grads = [None] * len(params.biases)
    slope_grads = (np.zeros_like(params.slopes)
                   if params.slopes is not None else None)

    for ell in range(len(params.weights) - 1, -1, -1):
        c = cache[ell]
        if params.activation == "identity":
            zbar, zgbar, zsbar = hbar, gbar, sbar
        else:
            slope = 1.0 if params.slopes is None else params.slopes[ell]
            zbar, zgbar, zsbar, sg = kernels.act_tanh_backward(
                c["z"], c["t"], c["zg"], c["zs"], hbar, gbar, sbar, slope,
                need_slope_grad=params.slopes is not None)
            if slope_grads is not None:
                slope_grads[ell] = sg
        w = params.weights[ell]
        wg = zbar.T @ c["h"]
        wg += np.einsum("pdo,pdi->oi", zgbar, c["hg"])
        wg += np.einsum("pdo,pdi->oi", zsbar, c["hs"])
        w_grads[ell] = wg
        b_grads[ell] = zbar.sum(axis=0)
        if ell > 0:
            hbar = zbar @ w
            gbar = zgbar @ w
            sbar = zsbar @ w

    parts = []
    for wg, bg in zip(w_grads, b_grads):
        parts.append(wg.ravel())
        parts.append(bg)
    if slope_grads is not None:
        parts.append(slope_grads)
    parts.append(c_grad)
    return np.concatenate(parts)
