"""Loss assembly, the ridge least-squares system over basis coefficients,
the alternating LS / gradient-descent / pruning training loop, and the
baseline training modes.

Surrogate compositions handled here:
  - standard_pinn / w_pinn / a_pinn / rff_pinn: network only, weak boundary loss
  - strong_bc_poly / strong_bc_exp: u = lift + phi * network, residual loss only
  - fourier_pinn / fourier_pinn_no_ls: network + trainable Fourier bank
  - spectral_only: Fourier bank alone
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from . import diffnet, fourier, optim
from .boundary import DistanceFn, distance_jet, distance_steepness_jets, strong_eval
from .diffnet import BasisJets, JetBatch, MlpParams
from .linalg import RidgeProblem, ridge_solve
from .problems import CollocationSet, PdeProblem, apply_operator, sample_collocation, test_grid

VARIANT_TAGS = ("standard_pinn", "strong_bc_poly", "strong_bc_exp",
                "fourier_pinn", "fourier_pinn_no_ls", "rff_pinn",
                "w_pinn", "a_pinn", "spectral_only")

W_PINN_WEIGHTS = (1e-1, 1e-3, 1e-4)

# Gaussian-variance table for the RFF baseline: label -> (scales, features per scale)
RFF_SCALE_TABLE = {
    "low": ((1.0,), 64),
    "mid": ((1.0, 20.0), 64),
    "wide": ((1.0, 20.0, 50.0, 100.0), 64),
}


class TrainingError(RuntimeError):
    """Raised when a run diverges or a phase cannot proceed."""


@dataclass
class ModelVariant:
    tag: str
    residual_weight: float = 1.0       # w_pinn only
    rff_scales: str = "wide"           # key into RFF_SCALE_TABLE

    def __post_init__(self):
        if self.tag not in VARIANT_TAGS:
            raise ValueError(
                f"unknown variant {self.tag!r}; registered: {', '.join(VARIANT_TAGS)}")
        if self.tag == "w_pinn" and self.residual_weight not in W_PINN_WEIGHTS:
            raise ValueError(f"w_pinn residual weight must be one of {W_PINN_WEIGHTS}")
        if self.tag == "rff_pinn" and self.rff_scales not in RFF_SCALE_TABLE:
            raise ValueError(
                f"rff scales must be one of {sorted(RFF_SCALE_TABLE)}")


@dataclass
class TrainingSchedule:
    seed: int = 0
    net_widths: tuple = (1, 40, 40, 1)
    k_max: object = 128                # int (1D) or (Kx, Ky)
    basis_periods: object = None       # per-axis basis period; None = domain length
    n_interior: int = 1201
    n_boundary: int = 2
    colloc_scheme: str = "equispaced"
    adam_iters: int = 10_000
    warm_start_iters: int = 2000
    gd_block_iters: int = 1000
    inner_ls_rounds: int = 5
    prune_threshold: float = 1e-4      # 0 disables pruning
    reg_strength: float = 1e-4         # 0 disables the L2 term
    boundary_weight: float = 1.0
    adam_lr: float = 1e-3
    lbfgs_max_iters: int = 200
    lbfgs_grad_tol: float = 1e-9
    lbfgs_rel_loss_tol: float = 1e-12
    history_every: int = 200
    test_points: int = 2048

    def __post_init__(self):
        if min(self.adam_iters, self.warm_start_iters, self.gd_block_iters,
               self.inner_ls_rounds) < 0:
            raise ValueError("iteration counts must be >= 0")
        if self.prune_threshold < 0 or self.reg_strength < 0:
            raise ValueError("delta and alpha must be >= 0")
        if self.boundary_weight <= 0:
            raise ValueError("boundary weight must be > 0")


@dataclass
class SurrogateModel:
    variant: str
    problem: PdeProblem
    net: MlpParams | None = None
    fourier_layer: object = None               # FourierLayer1D | FourierLayer2D
    distance: DistanceFn | None = None
    lift: tuple | None = None                  # (intercept, slope) for 1D strong BC
    rff: fourier.RffEmbedding | None = None
    residual_weight: float = 1.0

    @property
    def has_boundary_loss(self) -> bool:
        return self.distance is None

    @property
    def trains_steepness(self) -> bool:
        return self.distance is not None and self.distance.trainable

    def n_active_fourier(self) -> int:
        lay = self.fourier_layer
        if lay is None:
            return 0
        if isinstance(lay, fourier.FourierLayer1D):
            return int(lay.freqs.size)
        return int(lay.freqs_x.size + lay.freqs_y.size)

    def n_active_nn(self) -> int:
        return 0 if self.net is None else int(self.net.active.sum())


@dataclass
class TrainingHistory:
    records: list = field(default_factory=list)   # (iter, phase, lt, lb, lr, rel_l2)
    prune_events: list = field(default_factory=list)
    phase_seconds: dict = field(default_factory=dict)
    final_rel_l2: float = float("nan")
    wall_clock_s: float = 0.0
    ls_flags: list = field(default_factory=list)


# ---------------------------------------------------------------------------
# model construction and flat parameter vector
# ---------------------------------------------------------------------------

def build_model(variant: ModelVariant, problem: PdeProblem,
                schedule: TrainingSchedule) -> SurrogateModel:
    tag = variant.tag
    d = problem.dim
    model = SurrogateModel(variant=tag, problem=problem,
                           residual_weight=variant.residual_weight)
    activation = "adaptive_tanh" if tag == "a_pinn" else "tanh"
    widths = list(schedule.net_widths)
    rng_seed = schedule.seed

    if tag == "rff_pinn":
        scales, per_scale = RFF_SCALE_TABLE[variant.rff_scales]
        model.rff = fourier.sample_rff(scales, per_scale, d, rng_seed)
        widths[0] = model.rff.n_features
    elif tag != "spectral_only":
        widths[0] = d

    if tag != "spectral_only":
        model.net = diffnet.init_params(widths, rng_seed, activation)

    if tag in ("fourier_pinn", "fourier_pinn_no_ls", "spectral_only"):
        periods = schedule.basis_periods
        if periods is None:
            periods = tuple(problem.hi - problem.lo)
        if d == 1:
            model.fourier_layer = fourier.make_candidates(
                int(schedule.k_max), float(periods[0]))
        else:
            model.fourier_layer = fourier.make_candidates_2d(
                schedule.k_max, periods)

    if tag in ("strong_bc_poly", "strong_bc_exp"):
        if problem.operator == "wave":
            raise TrainingError(
                "strong boundary enforcement needs Dirichlet data on every face")
        trainable = tag == "strong_bc_exp"
        if tag == "strong_bc_poly":
            model.distance = DistanceFn("poly", problem.lo, problem.hi)
        else:
            half = np.full(d, 0.5)
            model.distance = DistanceFn("exp", problem.lo, problem.hi,
                                        steep_lo=half, steep_hi=half.copy(),
                                        trainable=trainable)
        model.lift = _make_lift(problem)
    return model


def _make_lift(problem: PdeProblem):
    """Linear interpolant through the endpoint data (1D); zero lift otherwise.

    2D strong-BC runs require homogeneous Dirichlet data.
    """
    if problem.dim == 1:
        ga = float(problem.boundary_data(problem.lo[None, :])[0])
        gb = float(problem.boundary_data(problem.hi[None, :])[0])
        slope = (gb - ga) / float(problem.hi[0] - problem.lo[0])
        return (ga - slope * float(problem.lo[0]), slope)
    probe = sample_collocation(problem, 4, 400).boundary
    if np.max(np.abs(problem.boundary_data(probe))) > 1e-12:
        raise TrainingError(
            "strong BC in 2D supports homogeneous Dirichlet data only")
    return (0.0, 0.0)


def _lift_jets(model: SurrogateModel, points) -> JetBatch | None:
    if model.lift is None:
        return None
    a, b = model.lift
    pts = np.atleast_2d(points)
    p, d = pts.shape
    grad = np.zeros((p, d))
    grad[:, 0] = b
    return JetBatch(a + b * pts[:, 0], grad, np.zeros((p, d)))


def _fourier_coeffs(layer) -> np.ndarray:
    if isinstance(layer, fourier.FourierLayer1D):
        return layer.coeff_vector()
    return layer.beta


def _with_fourier_coeffs(layer, vec):
    if isinstance(layer, fourier.FourierLayer1D):
        return layer.with_coeffs(vec)
    return fourier.FourierLayer2D(layer.domain_lengths, layer.freqs_x,
                                  layer.freqs_y, vec.copy())


def model_vector(model: SurrogateModel) -> np.ndarray:
    parts = []
    if model.net is not None:
        parts.append(diffnet.pack_params(model.net))
    if model.fourier_layer is not None:
        parts.append(_fourier_coeffs(model.fourier_layer))
    if model.trains_steepness:
        d = model.distance
        parts.append(np.log(np.stack([d.steep_lo, d.steep_hi], axis=1).ravel()))
    if not parts:
        raise TrainingError("model has no trainable parameters")
    return np.concatenate(parts)


def model_with_vector(model: SurrogateModel, vec: np.ndarray) -> SurrogateModel:
    out = SurrogateModel(variant=model.variant, problem=model.problem,
                         net=model.net, fourier_layer=model.fourier_layer,
                         distance=model.distance, lift=model.lift,
                         rff=model.rff, residual_weight=model.residual_weight)
    i = 0
    if model.net is not None:
        n = diffnet.n_params(model.net)
        out.net = diffnet.unpack_params(model.net, vec[i:i + n])
        i += n
    if model.fourier_layer is not None:
        n = _fourier_coeffs(model.fourier_layer).size
        out.fourier_layer = _with_fourier_coeffs(model.fourier_layer, vec[i:i + n])
        i += n
    if model.trains_steepness:
        d = model.distance
        n = 2 * d.dim
        alpha = np.exp(vec[i:i + n]).reshape(d.dim, 2)
        out.distance = DistanceFn("exp", d.lo, d.hi, steep_lo=alpha[:, 0],
                                  steep_hi=alpha[:, 1], trainable=True)
        i += n
    if i != vec.size:
        raise ValueError("flat vector length mismatch")
    return out


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------

@dataclass
class ModelEval:
    u: JetBatch
    net_bases: BasisJets | None = None
    net_combined: JetBatch | None = None   # pre-distance network output
    fourier_tables: object = None
    dist: JetBatch | None = None


def eval_model(model: SurrogateModel, points, workspace: dict | None = None) -> ModelEval:
    pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
    ev = ModelEval(u=None)
    parts = []
    if model.net is not None:
        seed = None
        if model.rff is not None:
            seed = _cached(workspace, "rff",
                           lambda: fourier.rff_jets(model.rff, pts))
        ev.net_bases = diffnet.eval_jets(model.net, pts, seed_jets=seed)
        ev.net_combined = ev.net_bases.combined
        parts.append(ev.net_combined)
    if model.fourier_layer is not None:
        lay = model.fourier_layer
        if isinstance(lay, fourier.FourierLayer1D):
            tabs = _cached(workspace, ("f1d", lay.freqs.tobytes()),
                           lambda: fourier.basis_tables_1d(lay, pts))
            w = lay.coeff_vector()
            val, d1, d2 = tabs
            parts.append(JetBatch(val @ w, (d1 @ w)[:, None], (d2 @ w)[:, None]))
            ev.fourier_tables = tabs
        else:
            tabs = _cached(
                workspace,
                ("f2d", lay.freqs_x.tobytes(), lay.freqs_y.tobytes()),
                lambda: (fourier.axis_tables(lay.domain_lengths[0], lay.freqs_x, pts[:, 0])
                         + fourier.axis_tables(lay.domain_lengths[1], lay.freqs_y, pts[:, 1])))
            v1, g1, s1, v2, g2, s2 = tabs
            b = lay.beta_matrix()
            vb = v1 @ b
            value = np.einsum("pi,pi->p", vb, v2)
            dx = np.einsum("pi,pi->p", g1 @ b, v2)
            dy = np.einsum("pi,pi->p", vb, g2)
            dxx = np.einsum("pi,pi->p", s1 @ b, v2)
            dyy = np.einsum("pi,pi->p", vb, s2)
            parts.append(JetBatch(value, np.stack([dx, dy], axis=1),
                                  np.stack([dxx, dyy], axis=1)))
            ev.fourier_tables = tabs
    if model.distance is not None:
        if model.distance.trainable:
            ev.dist = distance_jet(model.distance, pts)
        else:
            ev.dist = _cached(workspace, "dist",
                              lambda: distance_jet(model.distance, pts))
        lift = _cached(workspace, "lift", lambda: _lift_jets(model, pts))
        ev.u = strong_eval(lift, ev.dist, parts[0])
        return ev
    u = parts[0]
    for extra in parts[1:]:
        u = u + extra
    ev.u = u
    return ev


def _cached(workspace, key, make):
    if workspace is None:
        return make()
    if key not in workspace:
        workspace[key] = make()
    return workspace[key]


def predict_values(model: SurrogateModel, points) -> np.ndarray:
    return eval_model(model, points).u.value


# ---------------------------------------------------------------------------
# loss and gradient
# ---------------------------------------------------------------------------

def _residual_adjoints(problem: PdeProblem, jets: JetBatch, scale: np.ndarray) -> JetBatch:
    """Adjoint jets of sum_i scale_i * residual_i with respect to the u jets."""
    p, d = jets.grad.shape
    av = np.zeros(p)
    ag = np.zeros((p, d))
    asec = np.zeros((p, d))
    if problem.operator in ("poisson", "allen_cahn"):
        asec[:] = scale[:, None]
        if problem.operator == "allen_cahn":
            av = scale * (3.0 * jets.value ** 2 - 1.0)
    elif problem.operator == "wave":
        ag[:, 0] = 10.0 * scale
        ag[:, 1] = scale
    else:
        raise ValueError(problem.operator)
    return JetBatch(av, ag, asec)


def _strong_chain(dist: JetBatch, adj: JetBatch) -> JetBatch:
    """Pull adjoints on u = lift + phi*v back to adjoints on v."""
    av = (adj.value * dist.value
          + np.einsum("pd,pd->p", adj.grad, dist.grad)
          + np.einsum("pd,pd->p", adj.second, dist.second))
    ag = adj.grad * dist.value[:, None] + 2.0 * adj.second * dist.grad
    asec = adj.second * dist.value[:, None]
    return JetBatch(av, ag, asec)


def _fourier_grad(model, ev: ModelEval, adj: JetBatch) -> np.ndarray:
    lay = model.fourier_layer
    if isinstance(lay, fourier.FourierLayer1D):
        val, d1, d2 = ev.fourier_tables
        return val.T @ adj.value + d1.T @ adj.grad[:, 0] + d2.T @ adj.second[:, 0]
    v1, g1, s1, v2, g2, s2 = ev.fourier_tables
    g = (v1 * adj.value[:, None]).T @ v2
    g += (g1 * adj.grad[:, 0][:, None]).T @ v2
    g += (v1 * adj.grad[:, 1][:, None]).T @ g2
    g += (s1 * adj.second[:, 0][:, None]).T @ v2
    g += (v1 * adj.second[:, 1][:, None]).T @ s2
    return g.reshape(-1)


def _steepness_grad(model, points, net_jets: JetBatch, adj: JetBatch) -> np.ndarray:
    """Gradient with respect to log-steepness of the exp distance function."""
    d = model.distance
    djets = distance_steepness_jets(d, points)
    alphas = np.stack([d.steep_lo, d.steep_hi], axis=1).ravel()
    out = np.empty(len(djets))
    v = net_jets
    for m, dj in enumerate(djets):
        du_val = dj.value * v.value
        du_grad = dj.grad * v.value[:, None] + dj.value[:, None] * v.grad
        du_sec = (dj.second * v.value[:, None] + 2.0 * dj.grad * v.grad
                  + dj.value[:, None] * v.second)
        out[m] = (adj.value @ du_val
                  + np.einsum("pd,pd->", adj.grad, du_grad)
                  + np.einsum("pd,pd->", adj.second, du_sec))
    return out * alphas   # chain rule through alpha = exp(log alpha)


def pinn_loss(model: SurrogateModel, problem: PdeProblem,
              colloc: CollocationSet, schedule: TrainingSchedule,
              workspace: dict | None = None):
    """Composite loss and its flat gradient in the model_vector layout.

    Returns (loss, grad, parts) with parts = {"boundary", "residual", "reg"}.
    """
    lam = schedule.boundary_weight
    wr = model.residual_weight
    x_int = colloc.interior
    ev = eval_model(model, x_int, workspace)
    f = _cached(workspace, "forcing", lambda: problem.forcing(x_int))
    gu, su = apply_operator(problem, ev.u)
    r = gu + su - f
    if not np.all(np.isfinite(r)):
        bad = int(np.argmax(~np.isfinite(r)))
        raise TrainingError(f"non-finite residual at interior point {bad}")
    n = r.size
    loss_res = float(r @ r) / n
    adj_int = _residual_adjoints(problem, ev.u, (2.0 * wr / n) * r)

    loss_bnd = 0.0
    ev_b = None
    adj_bnd = None
    if model.has_boundary_loss:
        x_b = colloc.boundary
        ev_b = eval_model(model, x_b, _sub(workspace, "bnd"))
        g = _cached(workspace, "bdata", lambda: problem.boundary_data(x_b))
        e = ev_b.u.value - g
        m = e.size
        loss_bnd = float(e @ e) / m
        p, dd = x_b.shape
        adj_bnd = JetBatch((2.0 * lam / m) * e, np.zeros((p, dd)),
                           np.zeros((p, dd)))

    # pull adjoints back to the network output when a distance function wraps it
    net_adj_int = adj_int
    if model.distance is not None:
        net_adj_int = _strong_chain(ev.dist, adj_int)

    grads = []
    if model.net is not None:
        seed = None
        if model.rff is not None:
            seed = _cached(workspace, "rff",
                           lambda: fourier.rff_jets(model.rff, x_int))
        gnet = diffnet.param_gradient(model.net, x_int, net_adj_int,
                                      seed_jets=seed)
        if adj_bnd is not None:
            seed_b = None
            if model.rff is not None:
                seed_b = _cached(_sub(workspace, "bnd"), "rff",
                                 lambda: fourier.rff_jets(model.rff,
                                                          colloc.boundary))
            gnet = gnet + diffnet.param_gradient(model.net, colloc.boundary,
                                                 adj_bnd, seed_jets=seed_b)
        grads.append(gnet)
    reg = 0.0
    if model.fourier_layer is not None:
        gfour = _fourier_grad(model, ev, adj_int)
        if adj_bnd is not None:
            gfour = gfour + _fourier_grad(model, ev_b, adj_bnd)
        alpha = schedule.reg_strength
        if alpha > 0.0:
            w = _fourier_coeffs(model.fourier_layer)
            reg += 0.5 * alpha * float(w @ w)
            gfour = gfour + alpha * w
            if model.net is not None:
                c = model.net.coeffs * model.net.active
                reg += 0.5 * alpha * float(c @ c)
                nc = model.net.coeffs.size
                grads[0][-nc:] += alpha * c
        grads.append(gfour)
    if model.trains_steepness:
        grads.append(_steepness_grad(model, x_int, ev.net_combined, adj_int))

    loss = lam * loss_bnd + wr * loss_res + reg
    grad = np.concatenate(grads)
    parts = {"boundary": loss_bnd, "residual": loss_res, "reg": reg}
    return loss, grad, parts


def _sub(workspace, key):
    if workspace is None:
        return None
    return workspace.setdefault(key, {})


# ---------------------------------------------------------------------------
# least-squares system over basis coefficients
# ---------------------------------------------------------------------------

@dataclass
class LsLayout:
    nn_index: np.ndarray     # active NN basis indices (columns 0..len-1)
    n_fourier: int


def _basis_design(model: SurrogateModel, problem: PdeProblem,
                  points, rows: str, workspace=None):
    """Design blocks (nn_block, fourier_block) for residual or value rows."""
    nn_block = None
    if model.net is not None:
        seed = None
        if model.rff is not None:
            seed = fourier.rff_jets(model.rff, points)
        bj = diffnet.eval_jets(model.net, points, seed_jets=seed)
        idx = np.flatnonzero(model.net.active)
        if rows == "value":
            nn_block = bj.psi_value[:, idx]
        elif problem.operator in ("poisson", "allen_cahn"):
            nn_block = bj.psi_second[:, :, idx].sum(axis=1)
        else:
            nn_block = bj.psi_grad[:, 1, idx] + 10.0 * bj.psi_grad[:, 0, idx]
    f_block = None
    lay = model.fourier_layer
    if lay is not None:
        if isinstance(lay, fourier.FourierLayer1D):
            val, d1, d2 = fourier.basis_tables_1d(lay, points)
            f_block = val if rows == "value" else d2
        else:
            pts = np.atleast_2d(points)
            v1, g1, s1 = fourier.axis_tables(lay.domain_lengths[0],
                                             lay.freqs_x, pts[:, 0])
            v2, g2, s2 = fourier.axis_tables(lay.domain_lengths[1],
                                             lay.freqs_y, pts[:, 1])
            if rows == "value":
                f_block = fourier.pair_block(v1, v2)
            elif problem.operator in ("poisson", "allen_cahn"):
                f_block = fourier.pair_block(s1, v2) + fourier.pair_block(v1, s2)
            else:
                f_block = (fourier.pair_block(v1, g2)
                           + 10.0 * fourier.pair_block(g1, v2))
    return nn_block, f_block


def assemble_ls_system(model: SurrogateModel, problem: PdeProblem,
                       colloc: CollocationSet, schedule: TrainingSchedule):
    """RidgeProblem over w = (active NN coeffs, Fourier coeffs) plus layout.

    Residual rows apply the linear operator to every basis; the nonlinear term
    of the current model is folded into the target. Boundary rows are scaled
    by sqrt(boundary_weight).
    """
    if model.fourier_layer is None:
        raise TrainingError("LS system requires a Fourier layer")
    nn_int, f_int = _basis_design(model, problem, colloc.interior, "residual")
    blocks = [b for b in (nn_int, f_int) if b is not None]
    a_int = np.hstack(blocks)
    if a_int.shape[1] == 0:
        raise TrainingError("every basis has been pruned away")
    y_int = problem.forcing(colloc.interior)
    if not problem.is_linear:
        ev = eval_model(model, colloc.interior)
        _, s_cur = apply_operator(problem, ev.u)
        # re-linearize when the current iterate sits outside the fixed
        # point's contraction basin (nonlinear term dominating the forcing)
        if np.linalg.norm(s_cur) <= np.linalg.norm(y_int):
            y_int = y_int - s_cur

    sl = np.sqrt(schedule.boundary_weight)
    nn_b, f_b = _basis_design(model, problem, colloc.boundary, "value")
    a_bnd = sl * np.hstack([b for b in (nn_b, f_b) if b is not None])
    y_bnd = sl * problem.boundary_data(colloc.boundary)

    design = np.vstack([a_int, a_bnd])
    targets = np.concatenate([y_int, y_bnd])
    layout = LsLayout(
        nn_index=(np.flatnonzero(model.net.active)
                  if model.net is not None else np.empty(0, dtype=np.int64)),
        n_fourier=_fourier_coeffs(model.fourier_layer).size)
    return RidgeProblem(design, targets, schedule.reg_strength), layout


def _apply_ls_solution(model: SurrogateModel, layout: LsLayout,
                       w: np.ndarray) -> SurrogateModel:
    out = SurrogateModel(variant=model.variant, problem=model.problem,
                         net=model.net, fourier_layer=model.fourier_layer,
                         distance=model.distance, lift=model.lift,
                         rff=model.rff, residual_weight=model.residual_weight)
    k = layout.nn_index.size
    if model.net is not None:
        net = model.net.copy()
        net.coeffs = np.zeros_like(net.coeffs)
        net.coeffs[layout.nn_index] = w[:k]
        out.net = net
    out.fourier_layer = _with_fourier_coeffs(model.fourier_layer, w[k:])
    return out


def _prune_model(model: SurrogateModel, delta: float):
    """Drop Fourier frequencies and NN bases below the magnitude threshold."""
    removed_freqs, removed_nn = [], []
    lay = model.fourier_layer
    new_layer, report = fourier.prune_bases(lay, fourier.coeff_magnitudes(lay),
                                            delta)
    removed_freqs = report.removed
    net = model.net
    if net is not None:
        mags = np.abs(net.coeffs) * net.active
        drop = net.active & (mags < delta)
        if drop.any():
            net = net.copy()
            removed_nn = list(np.flatnonzero(drop))
            net.active = net.active & ~drop
            net.coeffs = net.coeffs * net.active
    survivors = _fourier_coeffs(new_layer).size
    survivors += 0 if net is None else int(net.active.sum())
    if survivors == 0:
        raise TrainingError("pruning removed every basis; lower delta")
    out = SurrogateModel(variant=model.variant, problem=model.problem,
                         net=net, fourier_layer=new_layer,
                         distance=model.distance, lift=model.lift,
                         rff=model.rff, residual_weight=model.residual_weight)
    return out, removed_freqs, removed_nn


def ls_fixed_point(model: SurrogateModel, problem: PdeProblem,
                   colloc: CollocationSet, schedule: TrainingSchedule,
                   rounds: int | None = None):
    """Alternate {assemble -> ridge solve -> prune} with fixed hidden params.

    Returns (model, target drift per round, removed freqs, removed nn indices,
    ls metadata flags).
    """
    rounds = schedule.inner_ls_rounds if rounds is None else rounds
    if rounds < 1:
        raise ValueError("rounds must be >= 1")
    drifts = []
    all_freqs, all_nn = [], []
    flags = []
    prev_targets = None
    prev_norm = None
    for _ in range(rounds):
        rp, layout = assemble_ls_system(model, problem, colloc, schedule)
        sol = ridge_solve(rp)
        flags.append(sol.min_norm_fallback)
        if prev_targets is not None and prev_targets.size == rp.targets.size:
            drifts.append(float(np.linalg.norm(rp.targets - prev_targets)))
        prev_targets = rp.targets
        wn = float(np.linalg.norm(sol.coeffs))
        if prev_norm is not None and prev_norm > 0 and wn > 1e3 * prev_norm:
            raise TrainingError("LS fixed point diverged (coefficient blow-up)")
        prev_norm = max(wn, 1e-30)
        model = _apply_ls_solution(model, layout, sol.coeffs)
        if schedule.prune_threshold > 0.0:
            model, rf, rn = _prune_model(model, schedule.prune_threshold)
            all_freqs.extend(rf)
            all_nn.extend(rn)
    return model, drifts, all_freqs, all_nn, flags


# ---------------------------------------------------------------------------
# training driver
# ---------------------------------------------------------------------------

def _rel_l2(model: SurrogateModel, grid, truth_vals) -> float:
    pred = predict_values(model, grid)
    return float(np.linalg.norm(pred - truth_vals) / np.linalg.norm(truth_vals))


def _adam_phase(model, problem, colloc, schedule, iters, phase, hist, grid,
                truth_vals, it0):
    if iters <= 0:
        return model, it0
    vec = model_vector(model)
    state = optim.AdamState(vec.size, lr0=schedule.adam_lr)
    workspace = {}
    for t in range(iters):
        cur = model_with_vector(model, vec)
        loss, grad, parts = pinn_loss(cur, problem, colloc, schedule, workspace)
        state, vec = optim.adam_step(state, vec, grad)
        it = it0 + t + 1
        if it % schedule.history_every == 0 or t == iters - 1:
            hist.records.append((it, phase, loss, parts["boundary"],
                                 parts["residual"],
                                 _rel_l2(model_with_vector(model, vec), grid,
                                         truth_vals)))
    return model_with_vector(model, vec), it0 + iters


def train(variant: ModelVariant, problem: PdeProblem,
          schedule: TrainingSchedule):
    """Full training run for one (variant, problem, schedule); deterministic."""
    t_start = time.perf_counter()
    colloc = sample_collocation(problem, schedule.n_interior,
                                schedule.n_boundary, schedule.colloc_scheme,
                                schedule.seed)
    model = build_model(variant, problem, schedule)
    hist = TrainingHistory()
    grid = test_grid(problem, schedule.test_points)
    truth_vals = problem.truth(grid)
    it = 0

    uses_ls = variant.tag in ("fourier_pinn", "spectral_only")
    if uses_ls:
        # joint Adam warm start before the first coefficient solve, so the
        # hidden bases carry signal when they enter the LS system
        t0 = time.perf_counter()
        warm = min(schedule.warm_start_iters, schedule.adam_iters)
        model, it = _adam_phase(model, problem, colloc, schedule, warm,
                                "adam", hist, grid, truth_vals, it)
        hist.phase_seconds["warm_start"] = time.perf_counter() - t0

        remaining = schedule.adam_iters - warm
        n_rounds = remaining // max(schedule.gd_block_iters, 1)
        t0 = time.perf_counter()
        for rnd in range(n_rounds + 1):   # trailing LS pass after the last block
            model, drifts, rf, rn, flags = ls_fixed_point(
                model, problem, colloc, schedule)
            hist.ls_flags.extend(flags)
            if rf or rn:
                hist.prune_events.append((it, rf, rn))
            hist.records.append((it, "ls",
                                 *_loss_snapshot(model, problem, colloc,
                                                 schedule),
                                 _rel_l2(model, grid, truth_vals)))
            if rnd < n_rounds:
                model, it = _adam_phase(model, problem, colloc, schedule,
                                        schedule.gd_block_iters, "adam",
                                        hist, grid, truth_vals, it)
        hist.phase_seconds["alternating"] = time.perf_counter() - t0
    else:
        t0 = time.perf_counter()
        model, it = _adam_phase(model, problem, colloc, schedule,
                                schedule.adam_iters, "adam", hist, grid,
                                truth_vals, it)
        hist.phase_seconds["adam"] = time.perf_counter() - t0

    # quasi-Newton polish on the full parameter vector
    t0 = time.perf_counter()
    if schedule.lbfgs_max_iters > 0:
        workspace = {}

        def loss_and_grad(vec):
            cur = model_with_vector(model, vec)
            loss, grad, _ = pinn_loss(cur, problem, colloc, schedule, workspace)
            return loss, grad

        settings = optim.LbfgsSettings(
            max_iters=schedule.lbfgs_max_iters,
            grad_tol=schedule.lbfgs_grad_tol,
            rel_loss_tol=schedule.lbfgs_rel_loss_tol)
        result = optim.lbfgs_run(loss_and_grad, model_vector(model), settings)
        model = model_with_vector(model, result.params)
        it += len(result.trace) - 1
    hist.phase_seconds["lbfgs"] = time.perf_counter() - t0

    hist.records.append((it, "lbfgs", *_loss_snapshot(model, problem, colloc,
                                                      schedule),
                         _rel_l2(model, grid, truth_vals)))
    hist.final_rel_l2 = hist.records[-1][-1]
    hist.wall_clock_s = time.perf_counter() - t_start
    return model, hist


def _loss_snapshot(model, problem, colloc, schedule):
    loss, _, parts = pinn_loss(model, problem, colloc, schedule)
    return loss, parts["boundary"], parts["residual"]
