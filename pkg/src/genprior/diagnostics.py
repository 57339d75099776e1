"""Empirical estimates of the quantities the convergence theory runs on.

The restricted constants (lower/upper eigenvalue-type bounds over range
differences, restricted convexity/smoothness, basis incoherence) are not
computable exactly, so everything here is a sample extreme over pairs of
range points drawn from the latent sampling distribution.  Estimates are
therefore optimistic: adding pairs can only shrink the lower constants and
grow the upper ones.

Curvature estimates pair the reported loss value with its exact gradient
(``true_gradient``), not with the solvers' rescaled step direction, so
quadratic losses come out with their textbook constants (e.g. both
constants equal 2 for ||y - Ax||^2 under orthonormal A).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .generator import forward
from .numerics import as_matrix, as_vector
from .objectives import true_gradient, value

__all__ = [
    "SrecEstimate",
    "RscRssEstimate",
    "RateFit",
    "WindowReport",
    "empirical_srec",
    "rsc_rss_estimate",
    "convergence_rate",
    "incoherence_estimate",
    "sign_invariant_dist",
    "recon_error",
    "step_size_window_check",
    "contraction_bound_general",
    "contraction_bound_mismatch",
]

_DEGENERATE = 1e-9


@dataclass(frozen=True)
class SrecEstimate:
    """Sampled restricted eigenvalue bounds for A over range differences.

    gamma is the smallest observed ||A d||^2 / ||d||^2, rho the largest
    observed ||A d|| / ||d||, over pairs d = x1 - x2 of range points; the
    slack term of the restricted condition is folded into downstream
    convergence-rate floors and kept at 0 here.
    """

    gamma: float
    rho: float
    pairs_used: int
    slack: float = 0.0


@dataclass(frozen=True)
class RscRssEstimate:
    """Sampled restricted strong convexity/smoothness constants."""

    alpha: float
    beta: float
    samples: int

    @property
    def ratio(self):
        return self.beta / self.alpha


@dataclass(frozen=True)
class RateFit:
    """Least-squares contraction factor of an objective trace.

    alpha_fit = exp(slope of log F versus iteration), fitted only over
    iterations with F above the floor; delta_fit is the smallest objective
    seen in the trace (clamped at 0), the empirical convergence floor.
    """

    alpha_fit: float
    delta_fit: float
    iterations_used: int
    fit_residual: float


@dataclass(frozen=True)
class WindowReport:
    """Step-size window check against sampled restricted constants."""

    eta: float
    gamma: float
    rho: float
    in_window: bool          # 1/(2 gamma) < eta < 1/gamma
    predicted_factor: float  # 1/(eta gamma) - 1
    rho_sq_ok: bool          # rho^2 < 1/eta

    @property
    def passed(self):
        return self.in_window and self.rho_sq_ok


def _range_points(net, count, rng):
    zs = rng.standard_normal((count, net.latent_dim))
    return forward(net, zs)


def _range_pairs(net, count, rng):
    """count pairs of range points, drawn interleaved so that pair i is the
    same whatever the total count (sample extremes are then monotone in the
    sample size for a fixed stream)."""
    zs = rng.standard_normal((2 * count, net.latent_dim))
    xs = forward(net, zs)
    return xs[0::2], xs[1::2]


def empirical_srec(a, net, num_pairs, rng):
    """Sample extremes of ||A(x1-x2)|| / ||x1-x2|| over range-point pairs."""
    a = as_matrix(a, "A")
    num_pairs = int(num_pairs)
    if num_pairs < 1:
        raise ValueError("need at least one pair")
    x1, x2 = _range_pairs(net, num_pairs, rng)
    d = x1 - x2
    norms = np.linalg.norm(d, axis=1)
    keep = norms > _DEGENERATE
    if not np.any(keep):
        raise ValueError("all sampled pairs are degenerate")
    ratios = np.linalg.norm(d[keep] @ a.T, axis=1) / norms[keep]
    return SrecEstimate(
        gamma=float(np.min(ratios**2)),
        rho=float(np.max(ratios)),
        pairs_used=int(np.sum(keep)),
    )


def rsc_rss_estimate(obj, net, num_pairs, rng):
    """Sample extremes of the Bregman curvature quotient over range pairs.

    For each sampled pair (x, x') of range points computes
    q = 2 [F(x') - F(x) - <grad F(x), x' - x>] / ||x' - x||^2 and returns
    (min q, max q).
    """
    num_pairs = int(num_pairs)
    if num_pairs < 1:
        raise ValueError("need at least one pair")
    xs, xps = _range_pairs(net, num_pairs, rng)
    qs = []
    for x, xp in zip(xs, xps):
        d = xp - x
        nd2 = float(d @ d)
        if nd2 <= _DEGENERATE**2:
            continue
        bregman = value(obj, xp) - value(obj, x) - float(true_gradient(obj, x) @ d)
        qs.append(2.0 * bregman / nd2)
    if not qs:
        raise ValueError("all sampled pairs are degenerate")
    return RscRssEstimate(alpha=float(np.min(qs)), beta=float(np.max(qs)),
                          samples=len(qs))


def convergence_rate(trace, floor):
    """Fit F_{t+1} ~= alpha * F_t on the log scale, above the given floor.

    Accepts a SolveTrace or a plain 1-D array of objective values.  Raises
    if fewer than 3 records sit above the floor.
    """
    f = np.asarray(getattr(trace, "objective", trace), dtype=np.float64)
    if floor < 0:
        raise ValueError("floor must be nonnegative")
    t = np.arange(f.shape[0], dtype=np.float64)
    mask = (f > floor) & (f > 0) & np.isfinite(f)
    used = int(np.sum(mask))
    if used < 3:
        raise ValueError(
            f"need at least 3 records above the floor, got {used}"
        )
    logf = np.log(f[mask])
    slope, intercept = np.polyfit(t[mask], logf, 1)
    resid = logf - (slope * t[mask] + intercept)
    return RateFit(
        alpha_fit=float(np.exp(slope)),
        delta_fit=float(max(np.min(f), 0.0)),
        iterations_used=used,
        fit_residual=float(np.sqrt(np.mean(resid**2))),
    )


def incoherence_estimate(net, b, num_samples, rng, sparsity=1, columns=None):
    """Largest normalized alignment between range differences and sparse
    basis differences.

    Samples ``num_samples`` pairs of range points and ``num_samples`` pairs
    of ``sparsity``-sparse combinations of the basis columns (restricted to
    ``columns`` when given) and maximizes |<u - u', v - v'>| / norms over
    all combinations of one range pair with one sparse pair.
    """
    b = as_matrix(b, "B")
    n = b.shape[0]
    if np.max(np.abs(b.T @ b - np.eye(n))) > 1e-8:
        raise ValueError("basis is not orthonormal to tolerance 1e-8")
    num_samples = int(num_samples)
    if num_samples < 1:
        raise ValueError("need at least one sample")
    cols = np.arange(n) if columns is None else np.asarray(columns, dtype=int)
    sparsity = int(sparsity)
    if not 1 <= sparsity <= cols.shape[0]:
        raise ValueError("sparsity must be in [1, number of allowed columns]")

    u1, u2 = _range_pairs(net, num_samples, rng)
    du = u1 - u2

    def sparse_draw():
        support = cols[rng.permutation(cols.shape[0])[:sparsity]]
        return b[:, support] @ rng.standard_normal(sparsity)

    dv = np.array([sparse_draw() - sparse_draw() for _ in range(num_samples)])

    nu = np.linalg.norm(du, axis=1)
    nv = np.linalg.norm(dv, axis=1)
    du = du[nu > _DEGENERATE]
    dv = dv[nv > _DEGENERATE]
    if du.shape[0] == 0 or dv.shape[0] == 0:
        raise ValueError("all sampled pairs are degenerate")
    du = du / np.linalg.norm(du, axis=1, keepdims=True)
    dv = dv / np.linalg.norm(dv, axis=1, keepdims=True)
    return float(min(np.max(np.abs(du @ dv.T)), 1.0))


def sign_invariant_dist(x1, x2):
    """min(||x1 - x2||, ||x1 + x2||): the error metric modulo global sign."""
    x1 = as_vector(x1, "x1")
    x2 = as_vector(x2, "x2")
    if x1.shape != x2.shape:
        raise ValueError(f"length mismatch: {x1.shape} vs {x2.shape}")
    return min(float(np.linalg.norm(x1 - x2)), float(np.linalg.norm(x1 + x2)))


def recon_error(x_hat, x_star):
    """Per-pixel squared reconstruction error ||x_hat - x_star||^2 / n."""
    x_hat = as_vector(x_hat, "x_hat")
    x_star = as_vector(x_star, "x_star")
    if x_hat.shape != x_star.shape:
        raise ValueError(f"length mismatch: {x_hat.shape} vs {x_star.shape}")
    d = x_hat - x_star
    return float(d @ d) / x_hat.shape[0]


def step_size_window_check(srec, eta):
    """Check eta against the sampled step-size window (1/(2 gamma), 1/gamma).

    Also reports the predicted per-iteration objective factor
    1/(eta*gamma) - 1 and whether rho^2 < 1/eta, the condition that makes
    the remaining proof term nonpositive.
    """
    if srec.gamma <= 0:
        raise ValueError("window check needs gamma > 0")
    if eta <= 0:
        raise ValueError("eta must be positive")
    lo, hi = 1.0 / (2.0 * srec.gamma), 1.0 / srec.gamma
    return WindowReport(
        eta=float(eta),
        gamma=srec.gamma,
        rho=srec.rho,
        in_window=bool(lo < eta < hi),
        predicted_factor=float(1.0 / (eta * srec.gamma) - 1.0),
        rho_sq_ok=bool(srec.rho**2 < 1.0 / eta),
    )


def contraction_bound_general(est):
    """Predicted objective-gap factor from curvature constants.

    The theory yields two candidate expressions, ratio - 1 from the stated
    bound and 2 - ratio from the final line of its derivation; both fall in
    (0, 1) when 1 <= ratio < 2 but differ numerically.  Returns
    (max of the two, label of the active one).
    """
    ratio = est.ratio
    stated = ratio - 1.0
    derived = 2.0 - ratio
    if stated >= derived:
        return float(stated), "ratio_minus_one"
    return float(derived), "two_minus_ratio"


def contraction_bound_mismatch(est, mu):
    """Predicted factor for the two-block (range + sparse) solver.

    (2 - ratio*(1 - 2.5 mu)/(1 - mu)) / (1 - (ratio/2) * mu/(1 - mu)),
    reported for inspection only; it can leave (0, 1) when the incoherence
    is too large for the regime the analysis assumes.
    """
    if not 0 <= mu < 1:
        raise ValueError("mu must be in [0, 1)")
    ratio = est.ratio
    num = 2.0 - ratio * (1.0 - 2.5 * mu) / (1.0 - mu)
    den = 1.0 - (ratio / 2.0) * mu / (1.0 - mu)
    if den <= 0:
        return float("inf")
    return float(num / den)
