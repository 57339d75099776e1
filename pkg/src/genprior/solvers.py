"""Projected-gradient solvers and latent-descent baselines.

Four alternating solvers share the same skeleton: a gradient step on the
data-fit loss followed by (approximate) projection back onto the feasible
set, starting from zero:

* ``pgd_linear``      linear measurements, squared loss;
* ``eps_pgd``         any smooth objective (the linear solver is its
                      squared-loss special case);
* ``phase_pgd``       magnitude-only measurements with a per-iteration
                      phase re-estimate p = sign(Ax) (sign(0) = +1);
* ``myopic_eps_pgd``  target split into a range component and a component
                      sparse in an ortho-basis; both blocks step with the
                      same gradient before their respective projections.

Two latent-space descent baselines, ``csgm_baseline`` (squared loss) and
``dpr_baseline`` (magnitude loss), optimize over z directly.

Every solver emits a :class:`SolveTrace` with one record per iterate
(including the initial point) and is bitwise deterministic given its inputs
and config.  The projection carries its latent warm start from one outer
iteration to the next.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .generator import forward, latent_gradient, sample_range
from .measurement import MeasurementModel
from .numerics import RngStream, as_matrix, as_vector
from .objectives import Objective, gradient, value
from .projection import ProjectionConfig, project

__all__ = [
    "SolverConfig",
    "SolveTrace",
    "SparseInnovation",
    "pgd_linear",
    "eps_pgd",
    "phase_pgd",
    "phase_init",
    "thresh_in_basis",
    "myopic_eps_pgd",
    "csgm_baseline",
    "dpr_baseline",
    "sign_pm",
]


@dataclass(frozen=True)
class SolverConfig:
    outer_steps: int = 15
    step_size: float = 0.5
    projection: ProjectionConfig = field(default_factory=ProjectionConfig)
    seed: int = 0
    ground_truth: np.ndarray | None = None  # x*, trace enrichment only

    def __post_init__(self):
        if self.outer_steps < 1:
            raise ValueError("outer_steps must be >= 1")
        if self.step_size <= 0:
            raise ValueError("step_size must be positive")


@dataclass
class SolveTrace:
    """Per-iteration records; arrays all have length outer_steps + 1.

    Columns without a defined value for a given solver or instance (no
    ground truth, no projection at t=0, non-phase problem) hold NaN.
    """

    objective: np.ndarray
    per_pixel_error: np.ndarray   # ||x_t - x*||^2 / n
    sign_error: np.ndarray        # min(||x_t - x*||, ||x_t + x*||)
    proj_residual: np.ndarray
    phase_flips: np.ndarray
    x_hat: np.ndarray
    z_hat: np.ndarray | None
    inner_updates: int
    extras: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.objective)

    @property
    def final_objective(self):
        return float(self.objective[-1])

    @property
    def final_per_pixel_error(self):
        return float(self.per_pixel_error[-1])


class _TraceBuilder:
    def __init__(self, x_star=None):
        self.x_star = None if x_star is None else as_vector(x_star, "ground_truth")
        self.cols = {k: [] for k in
                     ("objective", "per_pixel_error", "sign_error",
                      "proj_residual", "phase_flips")}

    def add(self, objective, x, proj_residual=np.nan, phase_flips=np.nan):
        if self.x_star is None:
            ppe = np.nan
            sgn = np.nan
        else:
            d = x - self.x_star
            s = x + self.x_star
            ppe = float(d @ d) / x.shape[0]
            sgn = min(float(np.linalg.norm(d)), float(np.linalg.norm(s)))
        self.cols["objective"].append(float(objective))
        self.cols["per_pixel_error"].append(ppe)
        self.cols["sign_error"].append(sgn)
        self.cols["proj_residual"].append(float(proj_residual))
        self.cols["phase_flips"].append(float(phase_flips))

    def build(self, x_hat, z_hat, inner_updates, extras=None):
        arrays = {k: np.asarray(v, dtype=np.float64) for k, v in self.cols.items()}
        return SolveTrace(x_hat=x_hat, z_hat=z_hat, inner_updates=inner_updates,
                          extras=extras or {}, **arrays)


def sign_pm(u):
    """Entrywise sign with sign(0) = +1, so phase vectors are always +-1."""
    return np.where(np.asarray(u) >= 0.0, 1.0, -1.0)


def _warm(proj_cfg, z_prev):
    if z_prev is None:
        return proj_cfg
    return replace(proj_cfg, init="warm", warm_z=z_prev)


def _projected_descent(obj, net, cfg):
    """Shared loop: x <- P_G(x - eta * gradient(x)), from x0 = 0."""
    n = net.output_dim
    x = np.zeros(n)
    z_prev = None
    rng = RngStream(cfg.seed)
    tb = _TraceBuilder(cfg.ground_truth)
    tb.add(value(obj, x), x)
    inner = 0
    for _ in range(cfg.outer_steps):
        w = x - cfg.step_size * gradient(obj, x)
        if np.all(np.isfinite(w)):
            res = project(net, w, _warm(cfg.projection, z_prev), rng)
            x, z_prev = res.x_proj, res.z_hat
            inner += cfg.projection.restarts * cfg.projection.inner_steps
            residual = res.residual
        else:
            residual = np.nan  # diverged step; hold the iterate, keep the trace finite
        tb.add(value(obj, x), x, proj_residual=residual)
    return x, tb.build(x, z_prev, inner)


def eps_pgd(obj, net, cfg):
    """Projected gradient descent on a smooth objective over Range(G)."""
    if obj.kind == "phase_corrected":
        raise ValueError("eps_pgd does not handle phase_corrected; use phase_pgd")
    return _projected_descent(obj, net, cfg)


def pgd_linear(y, a, net, cfg):
    """Projected gradient descent for linear measurements y = A x*.

    The squared-loss special case of :func:`eps_pgd`: the gradient step
    expands to w = x + eta * A.T (y - A x).
    """
    obj = Objective(model=MeasurementModel(matrix=a, link="linear"),
                    y=y, kind="squared")
    return _projected_descent(obj, net, cfg)


def phase_pgd(y, a, net, cfg, x0, phase_override=None):
    """Alternating phase estimation and projected descent for y = |A x*|.

    Each iteration estimates p = sign(Ax), takes the phase-corrected
    gradient step w = x + eta * A.T (y*p - Ax) and projects.  The recorded
    objective is ||y*p - Ax||^2 with the current phase estimate, i.e. the
    phaseless misfit sum (y_i - |(Ax)_i|)^2.

    ``phase_override`` pins the phase vector for every iteration (bypassing
    the sign re-estimate); with the true phase this reduces the algorithm
    to the linear solver on y*p.  Intended for tests and diagnostics.
    """
    y = as_vector(y, "y")
    a = as_matrix(a, "A")
    if np.any(y < 0):
        raise ValueError("magnitude observations must be entrywise nonnegative")
    x = as_vector(x0, "x0").copy()
    if x.shape[0] != net.output_dim:
        raise ValueError("x0 length does not match generator output dim")
    if phase_override is not None:
        phase_override = as_vector(phase_override, "phase_override")

    def current_phase(xv):
        if phase_override is not None:
            return phase_override
        return sign_pm(a @ xv)

    rng = RngStream(cfg.seed)
    tb = _TraceBuilder(cfg.ground_truth)
    z_prev = None
    inner = 0

    p = current_phase(x)
    r = y * p - a @ x
    tb.add(float(r @ r), x, phase_flips=0.0)
    for _ in range(cfg.outer_steps):
        w = x + cfg.step_size * (a.T @ (y * p - a @ x))
        if np.all(np.isfinite(w)):
            res = project(net, w, _warm(cfg.projection, z_prev), rng)
            x, z_prev = res.x_proj, res.z_hat
            inner += cfg.projection.restarts * cfg.projection.inner_steps
            residual = res.residual
        else:
            residual = np.nan
        p_new = current_phase(x)
        flips = float(np.sum(p_new != p))
        p = p_new
        r = y * p - a @ x
        tb.add(float(r @ r), x, proj_residual=residual, phase_flips=flips)
    return x, tb.build(x, z_prev, inner)


def phase_init(y, a, net, rng, strategy="best_of_samples", count=100,
               delta0=None, x_star=None, unit_norm=True):
    """Initial point for phase retrieval.

    ``best_of_samples`` draws ``count`` range points and keeps the one with
    the lowest phaseless misfit ||y - |Ax|||^2.  ``oracle_perturb`` returns
    x* + delta0*||x*||*u for a uniformly random unit direction u; it needs
    the ground truth and exists for controlled local-convergence studies.
    """
    y = as_vector(y, "y")
    a = as_matrix(a, "A")
    if strategy == "oracle_perturb":
        if x_star is None or delta0 is None:
            raise ValueError("oracle_perturb needs x_star and delta0")
        x_star = as_vector(x_star, "x_star")
        u = rng.standard_normal(x_star.shape[0])
        u /= np.linalg.norm(u)
        return x_star + delta0 * np.linalg.norm(x_star) * u
    if strategy == "best_of_samples":
        best_x, best_loss = None, np.inf
        for _ in range(int(count)):
            s = sample_range(net, rng, unit_norm=unit_norm)
            r = y - np.abs(a @ s.x)
            loss = float(r @ r)
            if loss < best_loss:
                best_x, best_loss = s.x, loss
        return best_x
    raise ValueError(f"unknown phase_init strategy {strategy!r}")


def _check_orthonormal(b, tol=1e-8):
    b = as_matrix(b, "B")
    if b.shape[0] != b.shape[1]:
        raise ValueError(f"basis must be square, got {b.shape}")
    gram = b.T @ b
    if np.max(np.abs(gram - np.eye(b.shape[0]))) > tol:
        raise ValueError("basis is not orthonormal to tolerance 1e-8")
    return b


def thresh_in_basis(w, b, l):
    """Keep the l largest-magnitude coefficients of w in basis B.

    Computes c = B.T w, zeroes all but the l largest |c| (ties break toward
    the lowest index), and returns B c.  l >= n returns w unchanged.
    """
    w = as_vector(w, "w")
    b = _check_orthonormal(b)
    n = w.shape[0]
    if b.shape[0] != n:
        raise ValueError("basis size does not match vector length")
    l = int(l)
    if l < 0:
        raise ValueError("sparsity level must be nonnegative")
    if l >= n:
        return w.copy()
    if l == 0:
        return np.zeros(n)
    c = b.T @ w
    order = np.argsort(-np.abs(c), kind="stable")  # stable: ties keep low index
    kept = np.zeros(n)
    kept[order[:l]] = c[order[:l]]
    return b @ kept


@dataclass(frozen=True)
class SparseInnovation:
    """Sparse-in-basis component: v with ||B.T v||_0 <= sparsity."""

    v: np.ndarray
    basis: np.ndarray
    sparsity: int

    def __post_init__(self):
        v = as_vector(self.v, "v")
        b = _check_orthonormal(self.basis, tol=1e-10)
        if v.shape[0] != b.shape[0]:
            raise ValueError("innovation length does not match basis size")
        coeffs = b.T @ v
        nnz = int(np.sum(np.abs(coeffs) > 1e-12))
        if nnz > self.sparsity:
            raise ValueError(
                f"innovation has {nnz} nonzero coefficients, exceeds {self.sparsity}"
            )
        object.__setattr__(self, "v", v)
        object.__setattr__(self, "basis", b)


def myopic_eps_pgd(obj, net, b, l, cfg):
    """Block solver for targets x* = G(z) + v with v sparse in basis B.

    Both blocks share one gradient evaluation per iteration, taken at the
    combined iterate x_t = u_t + v_t: the range block projects
    u_t - eta*grad onto Range(G), the sparse block hard-thresholds
    v_t - eta*grad in B.  Returns (x_hat, u_hat, v_hat, trace); the trace
    extras carry the per-iteration u and v blocks.
    """
    b = _check_orthonormal(b)
    n = net.output_dim
    if b.shape[0] != n:
        raise ValueError("basis size does not match generator output dim")
    u = np.zeros(n)
    v = np.zeros(n)
    x = np.zeros(n)
    z_prev = None
    rng = RngStream(cfg.seed)
    tb = _TraceBuilder(cfg.ground_truth)
    tb.add(value(obj, x), x)
    u_hist, v_hist = [u.copy()], [v.copy()]
    inner = 0
    for _ in range(cfg.outer_steps):
        g = gradient(obj, x)
        wu = u - cfg.step_size * g
        wv = v - cfg.step_size * g
        if np.all(np.isfinite(wu)) and np.all(np.isfinite(wv)):
            res = project(net, wu, _warm(cfg.projection, z_prev), rng)
            u, z_prev = res.x_proj, res.z_hat
            inner += cfg.projection.restarts * cfg.projection.inner_steps
            v = thresh_in_basis(wv, b, l)
            x = u + v
            residual = res.residual
        else:
            residual = np.nan  # diverged step; hold the blocks
        tb.add(value(obj, x), x, proj_residual=residual)
        u_hist.append(u.copy())
        v_hist.append(v.copy())
    trace = tb.build(x, z_prev, inner,
                     extras={"u": np.asarray(u_hist), "v": np.asarray(v_hist)})
    return x, u, v, trace


def _latent_descent(net, steps, rate, rng, x_star, z0, cotangent_fn, loss_fn):
    """Plain gradient descent over z; cotangent_fn maps G(z) to the signal-
    space gradient of the loss, which backpropagates through the net."""
    if int(steps) < 1:
        raise ValueError("steps must be >= 1")
    z = rng.standard_normal(net.latent_dim) if z0 is None else as_vector(z0, "z0").copy()
    gx = forward(net, z)
    tb = _TraceBuilder(x_star)
    tb.add(loss_fn(gx), gx)
    for _ in range(int(steps)):
        gz = latent_gradient(net, z, cotangent_fn(gx))
        z_next = z - rate * gz
        gx_next = forward(net, z_next)
        if np.all(np.isfinite(gx_next)) and np.isfinite(loss_fn(gx_next)):
            z, gx = z_next, gx_next
        # else: diverged; freeze at the last finite iterate so the trace
        # stays finite and non-convergence shows up in the data.
        tb.add(loss_fn(gx), gx)
    return gx, tb.build(gx, z, int(steps))


def csgm_baseline(y, a, net, steps, rate, rng, x_star=None, z0=None):
    """Plain latent-space gradient descent on ||y - A G(z)||^2."""
    a = as_matrix(a, "A")
    y = as_vector(y, "y")

    def cot(gx):
        return a.T @ (2.0 * (a @ gx - y))

    def loss(gx):
        r = y - a @ gx
        return float(r @ r)

    return _latent_descent(net, steps, rate, rng, x_star, z0, cot, loss)


def dpr_baseline(y, a, net, steps, rate, rng, x_star=None, z0=None):
    """Latent-space gradient descent on the magnitude loss ||y - |A G(z)|||^2.

    The subgradient of |u| at 0 is taken as 0 (numpy sign convention).
    """
    a = as_matrix(a, "A")
    y = as_vector(y, "y")
    if np.any(y < 0):
        raise ValueError("magnitude observations must be entrywise nonnegative")

    def cot(gx):
        u = a @ gx
        return a.T @ (2.0 * np.sign(u) * (np.abs(u) - y))

    def loss(gx):
        r = y - np.abs(a @ gx)
        return float(r @ r)

    return _latent_descent(net, steps, rate, rng, x_star, z0, cot, loss)
