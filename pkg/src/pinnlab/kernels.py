"""Hot numeric kernels with numba acceleration and a pure-numpy fallback.

The numba path is used by default whenever numba imports cleanly.  Setting
the environment variable ``PINNLAB_NO_NUMBA=1`` before import forces the
numpy path (useful for debugging and for the benchmark in
``benchmarks/bench_kernels.py``).  Both paths compute identical quantities;
the test suite runs the core checks against each.
"""

from __future__ import annotations

import os

import numpy as np

_USE_NUMBA = os.environ.get("PINNLAB_NO_NUMBA", "0") not in ("1", "true", "yes")

if _USE_NUMBA:
    try:
        from numba import njit
    except ImportError:  # pragma: no cover - numba is a hard dep, but stay importable
        _USE_NUMBA = False


def backend() -> str:
    return "numba" if _USE_NUMBA else "numpy"


# ---------------------------------------------------------------------------
# tanh activation applied to a batch of derivative jets.
#
# Inputs are pre-activation jets per point/unit: z (P,U), zg (P,D,U) first
# derivatives per input axis, zs (P,D,U) pure second derivatives.  The
# activation is tanh(slope * z); outputs are the post-activation jets.
# ---------------------------------------------------------------------------

def _act_forward_np(z, zg, zs, slope):
    t = np.tanh(slope * z)
    u1 = 1.0 - t * t
    d1 = slope * u1                       # sigma'
    d2 = -2.0 * slope * slope * t * u1    # sigma''
    h = t
    hg = d1[:, None, :] * zg
    hs = d2[:, None, :] * zg * zg + d1[:, None, :] * zs
    return h, hg, hs, t


def _act_backward_np(z, t, zg, zs, hbar, gbar, sbar, slope, need_slope_grad):
    s = slope
    u1 = 1.0 - t * t
    d1 = s * u1
    d2 = -2.0 * s * s * t * u1
    d3 = -2.0 * s ** 3 * u1 * (1.0 - 3.0 * t * t)

    zbar = hbar * d1
    zbar += np.einsum("pdu,pdu->pu", gbar, d2[:, None, :] * zg)
    zbar += np.einsum("pdu,pdu->pu", sbar, d3[:, None, :] * zg * zg + d2[:, None, :] * zs)
    zgbar = gbar * d1[:, None, :] + sbar * 2.0 * d2[:, None, :] * zg
    zsbar = sbar * d1[:, None, :]

    slope_grad = 0.0
    if need_slope_grad:
        # partials of sigma, sigma', sigma'' with respect to the slope
        p0 = z * u1
        p1 = u1 * (1.0 - 2.0 * s * z * t)
        p2 = -2.0 * s * u1 * (2.0 * t + s * z * (1.0 - 3.0 * t * t))
        slope_grad = float(np.sum(hbar * p0))
        slope_grad += float(np.einsum("pdu,pdu->", gbar, p1[:, None, :] * zg))
        slope_grad += float(
            np.einsum("pdu,pdu->", sbar, p2[:, None, :] * zg * zg + p1[:, None, :] * zs)
        )
    return zbar, zgbar, zsbar, slope_grad


def _trig_table_np(theta):
    return np.cos(theta), np.sin(theta)


if _USE_NUMBA:

    @njit(cache=True)
    def _act_forward_nb(z, zg, zs, slope):
        P, U = z.shape
        D = zg.shape[1]
        h = np.empty_like(z)
        t = np.empty_like(z)
        hg = np.empty_like(zg)
        hs = np.empty_like(zs)
        for p in range(P):
            for u in range(U):
                tv = np.tanh(slope * z[p, u])
                u1 = 1.0 - tv * tv
                d1 = slope * u1
                d2 = -2.0 * slope * slope * tv * u1
                t[p, u] = tv
                h[p, u] = tv
                for d in range(D):
                    g = zg[p, d, u]
                    hg[p, d, u] = d1 * g
                    hs[p, d, u] = d2 * g * g + d1 * zs[p, d, u]
        return h, hg, hs, t

    @njit(cache=True)
    def _act_backward_nb(z, t, zg, zs, hbar, gbar, sbar, slope, need_slope_grad):
        P, U = z.shape
        D = zg.shape[1]
        s = slope
        zbar = np.empty_like(z)
        zgbar = np.empty_like(zg)
        zsbar = np.empty_like(zs)
        slope_grad = 0.0
        for p in range(P):
            for u in range(U):
                tv = t[p, u]
                u1 = 1.0 - tv * tv
                d1 = s * u1
                d2 = -2.0 * s * s * tv * u1
                d3 = -2.0 * s ** 3 * u1 * (1.0 - 3.0 * tv * tv)
                acc = hbar[p, u] * d1
                for d in range(D):
                    g = zg[p, d, u]
                    acc += gbar[p, d, u] * d2 * g
                    acc += sbar[p, d, u] * (d3 * g * g + d2 * zs[p, d, u])
                    zgbar[p, d, u] = gbar[p, d, u] * d1 + sbar[p, d, u] * 2.0 * d2 * g
                    zsbar[p, d, u] = sbar[p, d, u] * d1
                zbar[p, u] = acc
                if need_slope_grad:
                    zv = z[p, u]
                    p0 = zv * u1
                    p1 = u1 * (1.0 - 2.0 * s * zv * tv)
                    p2 = -2.0 * s * u1 * (2.0 * tv + s * zv * (1.0 - 3.0 * tv * tv))
                    acc2 = hbar[p, u] * p0
                    for d in range(D):
                        g = zg[p, d, u]
                        acc2 += gbar[p, d, u] * p1 * g
                        acc2 += sbar[p, d, u] * (p2 * g * g + p1 * zs[p, d, u])
                    slope_grad += acc2
        return zbar, zgbar, zsbar, slope_grad

    @njit(cache=True)
    def _trig_table_nb(theta):
        return np.cos(theta), np.sin(theta)


def act_tanh_forward(z, zg, zs, slope=1.0):
    """tanh(slope * z) applied to jets; returns (value, grad, second, tanh-cache)."""
    if _USE_NUMBA:
        return _act_forward_nb(z, zg, zs, float(slope))
    return _act_forward_np(z, zg, zs, float(slope))


def act_tanh_backward(z, t, zg, zs, hbar, gbar, sbar, slope=1.0, need_slope_grad=False):
    """Adjoint of :func:`act_tanh_forward`.

    Given adjoints (hbar, gbar, sbar) of the post-activation jets, returns the
    adjoints of the pre-activation jets plus the scalar slope gradient.
    """
    if _USE_NUMBA:
        return _act_backward_nb(z, t, zg, zs, hbar, gbar, sbar, float(slope),
                                need_slope_grad)
    return _act_backward_np(z, t, zg, zs, hbar, gbar, sbar, float(slope),
                            need_slope_grad)


def trig_table(theta):
    """cos/sin evaluated over a (points x frequencies) phase table."""
    if _USE_NUMBA:
        return _trig_table_nb(np.ascontiguousarray(theta))
    return _trig_table_np(theta)
