"""Timing comparison of the numba kernels against the pure-numpy fallback.

Run twice, once per backend:

    python3 benchmarks/bench_kernels.py
    PINNLAB_NO_NUMBA=1 python3 benchmarks/bench_kernels.py

Each invocation prints median per-call times for the jet-activation forward
and backward kernels and the trig table at a training-sized workload.
"""

import time

import numpy as np

from pinnlab import kernels


def median_time(fn, repeats=30):
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return float(np.median(times))


def main():
    rng = np.random.default_rng(0)
    p, d, u = 1201, 2, 40
    z = rng.normal(size=(p, u))
    zg = rng.normal(size=(p, d, u))
    zs = rng.normal(size=(p, d, u))
    hbar = rng.normal(size=(p, u))
    gbar = rng.normal(size=(p, d, u))
    sbar = rng.normal(size=(p, d, u))
    theta = rng.normal(size=(p, 128)) * 50.0

    # warm up (numba compilation happens here)
    h, hg, hs, t = kernels.act_tanh_forward(z, zg, zs, 1.0)
    kernels.act_tanh_backward(z, t, zg, zs, hbar, gbar, sbar, 1.0)
    kernels.trig_table(theta)

    rows = [
        ("act_tanh_forward",
         median_time(lambda: kernels.act_tanh_forward(z, zg, zs, 1.0))),
        ("act_tanh_backward",
         median_time(lambda: kernels.act_tanh_backward(
             z, t, zg, zs, hbar, gbar, sbar, 1.0))),
        ("trig_table",
         median_time(lambda: kernels.trig_table(theta))),
    ]
    print(f"backend: {kernels.backend()}  (P={p}, D={d}, U={u})")
    for name, sec in rows:
        print(f"  {name:<20s} {sec * 1e6:10.1f} us/call")


if __name__ == "__main__":
    main()
