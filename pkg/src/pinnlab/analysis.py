"""Error metrics and the spectral toolkit.

The discrete transform is defined over N equispaced samples with coefficient
indices k = -N/2 .. N/2 - 1.  The direct O(N^2) summation is the reference
path; a radix-2 fast path is used automatically for power-of-two N and must
agree with the direct sum to 1e-10 (property-tested).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def relative_l2(pred, truth) -> float:
    pred = np.asarray(pred, dtype=np.float64).ravel()
    truth = np.asarray(truth, dtype=np.float64).ravel()
    if pred.shape != truth.shape:
        raise ValueError("length mismatch")
    denom = np.sqrt(np.sum(truth * truth))
    if denom == 0.0:
        raise ValueError("truth has zero norm")
    return float(np.sqrt(np.sum((pred - truth) ** 2)) / denom)


@dataclass
class Spectrum:
    coeffs: np.ndarray        # complex, ordered k = -N/2 .. N/2 - 1
    n: int
    domain_length: float

    def freqs(self) -> np.ndarray:
        return np.arange(-self.n // 2, self.n // 2)

    def coeff(self, k: int) -> complex:
        if not -self.n // 2 <= k < self.n // 2:
            raise IndexError(f"frequency {k} out of range")
        return complex(self.coeffs[k + self.n // 2])

    def amplitudes_positive(self):
        """(k >= 0, |coeff|) view for plotting real-signal spectra."""
        ks = np.arange(0, self.n // 2)
        return ks, np.abs(self.coeffs[self.n // 2:])


def dft_direct(samples) -> np.ndarray:
    """O(N^2) summation; coefficients ordered k = 0 .. N-1."""
    x = np.asarray(samples, dtype=np.float64)
    n = x.size
    idx = np.arange(n)
    kernel = np.exp(-2j * np.pi * np.outer(idx, idx) / n)
    return kernel @ x.astype(np.complex128)


def _fft_radix2(x: np.ndarray) -> np.ndarray:
    """Iterative radix-2 decimation-in-time FFT (N a power of two)."""
    n = x.size
    levels = n.bit_length() - 1
    # bit-reversal permutation
    rev = np.zeros(n, dtype=np.int64)
    for i in range(1, n):
        rev[i] = (rev[i >> 1] >> 1) | ((i & 1) << (levels - 1))
    a = x[rev].astype(np.complex128)
    size = 2
    while size <= n:
        half = size // 2
        tw = np.exp(-2j * np.pi * np.arange(half) / size)
        a = a.reshape(-1, size)
        even = a[:, :half]
        odd = a[:, half:] * tw
        a = np.concatenate([even + odd, even - odd], axis=1).reshape(-1)
        size *= 2
    return a


def dft(samples, domain_length: float, method: str = "auto") -> Spectrum:
    """Spectrum of real samples; N must be even (and >= 4)."""
    x = np.asarray(samples, dtype=np.float64)
    n = x.size
    if n < 4 or n % 2 != 0:
        raise ValueError("need an even sample count >= 4")
    if method == "auto":
        method = "fast" if n & (n - 1) == 0 else "direct"
    if method == "fast":
        if n & (n - 1) != 0:
            raise ValueError("fast path requires power-of-two N")
        raw = _fft_radix2(x)
    elif method == "direct":
        raw = dft_direct(x)
    else:
        raise ValueError(f"unknown method {method!r}")
    # reorder k = 0..N-1 (negative frequencies aliased to top half) into
    # k = -N/2 .. N/2 - 1
    coeffs = np.concatenate([raw[n // 2:], raw[: n // 2]])
    return Spectrum(coeffs=coeffs, n=n, domain_length=float(domain_length))


def spectrum_error(model_samples, truth_samples, domain_length):
    """Absolute amplitude error per nonnegative frequency."""
    a = np.asarray(model_samples, dtype=np.float64)
    b = np.asarray(truth_samples, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError("sampling grids must match")
    sa = dft(a, domain_length)
    sb = dft(b, domain_length)
    ks, amp_a = sa.amplitudes_positive()
    _, amp_b = sb.amplitudes_positive()
    return ks, np.abs(amp_a - amp_b)


def tail_energy(spec: Spectrum, k_min: int) -> float:
    """Sum of squared amplitudes with |k| > k_min."""
    ks = spec.freqs()
    mask = np.abs(ks) > k_min
    return float(np.sum(np.abs(spec.coeffs[mask]) ** 2))


def convolution_check(phi_coeffs, un_coeffs, utheta_coeffs) -> float:
    """Max deviation of utheta_hat from the discrete convolution phi_hat (*) un_hat.

    Sequences are aligned on indices -H..H; terms falling outside the range
    are treated as zero, and the deviation is measured only on the interior
    band |n| <= H/2 where truncation does not bite.
    """
    phi = np.asarray(phi_coeffs, dtype=np.complex128)
    un = np.asarray(un_coeffs, dtype=np.complex128)
    ut = np.asarray(utheta_coeffs, dtype=np.complex128)
    if phi.shape != un.shape or phi.shape != ut.shape:
        raise ValueError("sequences must share an index range")
    h = (phi.size - 1) // 2
    if phi.size != 2 * h + 1:
        raise ValueError("sequences must cover -H..H")
    full = np.convolve(phi, un)            # indices -2H .. 2H
    conv = full[h: 3 * h + 1]              # restrict to -H .. H
    band = np.arange(-h, h + 1)
    mask = np.abs(band) <= h // 2
    return float(np.max(np.abs(ut[mask] - conv[mask]))) if mask.any() else 0.0


def series_coefficients(fn, domain_length, h_max, nodes=8192):
    """Fourier-series coefficients -H..H of a callable by trapezoid quadrature."""
    x = np.linspace(0.0, domain_length, nodes + 1)
    f = fn(x)
    out = np.empty(2 * h_max + 1, dtype=np.complex128)
    for i, n in enumerate(range(-h_max, h_max + 1)):
        integrand = f * np.exp(-2j * np.pi * n * x / domain_length)
        out[i] = np.trapezoid(integrand, x) / domain_length
    return out
