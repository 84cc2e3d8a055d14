"""Optimizers: Adam with a stepped exponential learning-rate decay, and
L-BFGS (two-loop recursion, backtracking Armijo line search).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass
class AdamState:
    n_params: int
    lr0: float = 1e-3
    decay_rate: float = 0.9
    decay_every: int = 1000
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    step: int = 0
    m: np.ndarray = field(default=None)
    v: np.ndarray = field(default=None)

    def __post_init__(self):
        if self.m is None:
            self.m = np.zeros(self.n_params)
        if self.v is None:
            self.v = np.zeros(self.n_params)
        if self.lr0 <= 0 or not 0 < self.decay_rate <= 1:
            raise ValueError("bad learning-rate settings")

    def lr(self) -> float:
        return self.lr0 * self.decay_rate ** (self.step // self.decay_every)


def adam_step(state: AdamState, params: np.ndarray, grad: np.ndarray):
    """One bias-corrected Adam update; mutates and returns the state."""
    grad = np.asarray(grad, dtype=np.float64)
    if grad.shape != params.shape:
        raise ValueError("gradient shape mismatch")
    if not np.all(np.isfinite(grad)):
        raise FloatingPointError("non-finite gradient passed to adam_step")
    state.step += 1
    t = state.step
    state.m = state.beta1 * state.m + (1 - state.beta1) * grad
    state.v = state.beta2 * state.v + (1 - state.beta2) * grad * grad
    mhat = state.m / (1 - state.beta1 ** t)
    vhat = state.v / (1 - state.beta2 ** t)
    new_params = params - state.lr() * mhat / (np.sqrt(vhat) + state.eps)
    return state, new_params


@dataclass
class LbfgsSettings:
    memory: int = 20
    grad_tol: float = 1e-9
    rel_loss_tol: float = 1e-12
    max_iters: int = 500
    armijo_c: float = 1e-4
    max_halvings: int = 40
    initial_step: float = 1e-2   # trial step length for the very first iteration


@dataclass
class LbfgsResult:
    params: np.ndarray
    trace: list
    converged: bool
    line_search_failed: bool = False


def lbfgs_run(loss_and_grad, params: np.ndarray,
              settings: LbfgsSettings | None = None) -> LbfgsResult:
    """Minimize a deterministic loss; returns the best-seen point on failure."""
    st = settings or LbfgsSettings()
    x = np.asarray(params, dtype=np.float64).copy()
    f, g = loss_and_grad(x)
    trace = [float(f)]
    best_x, best_f = x.copy(), f
    s_hist: list = []
    y_hist: list = []
    rho_hist: list = []
    for it in range(st.max_iters):
        gnorm = float(np.max(np.abs(g))) if g.size else 0.0
        if gnorm <= st.grad_tol:
            return LbfgsResult(x, trace, converged=True)
        # two-loop recursion
        q = g.copy()
        alphas = []
        for s, y, rho in zip(reversed(s_hist), reversed(y_hist),
                             reversed(rho_hist)):
            a = rho * np.dot(s, q)
            alphas.append(a)
            q -= a * y
        if y_hist:
            gamma = np.dot(s_hist[-1], y_hist[-1]) / np.dot(y_hist[-1], y_hist[-1])
            q *= gamma
        for (s, y, rho), a in zip(zip(s_hist, y_hist, rho_hist),
                                  reversed(alphas)):
            b = rho * np.dot(y, q)
            q += (a - b) * s
        d = -q
        slope = np.dot(g, d)
        if slope >= 0:
            d = -g
            slope = -np.dot(g, g)
        step = st.initial_step if not y_hist else 1.0
        accepted = False
        for _ in range(st.max_halvings):
            x_new = x + step * d
            f_new, g_new = loss_and_grad(x_new)
            if np.isfinite(f_new) and f_new <= f + st.armijo_c * step * slope:
                accepted = True
                break
            step *= 0.5
        if not accepted:
            return LbfgsResult(best_x, trace, converged=False,
                               line_search_failed=True)
        s = x_new - x
        y = g_new - g
        sy = np.dot(s, y)
        if sy > 1e-16:
            s_hist.append(s)
            y_hist.append(y)
            rho_hist.append(1.0 / sy)
            if len(s_hist) > st.memory:
                s_hist.pop(0)
                y_hist.pop(0)
                rho_hist.pop(0)
        rel_change = abs(f - f_new) / max(abs(f), 1e-300)
        x, f, g = x_new, f_new, g_new
        trace.append(float(f))
        if f < best_f:
            best_f, best_x = f, x.copy()
        if rel_change <= st.rel_loss_tol:
            return LbfgsResult(x, trace, converged=True)
    return LbfgsResult(best_x if best_f < f else x, trace, converged=False)
