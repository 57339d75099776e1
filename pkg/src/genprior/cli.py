"""Experiment harness: build instances, run solvers, write traces and sweeps.

Subcommands::

    genprior gen      --config c.txt [--out DIR]   write generator weights
    genprior solve    --config c.txt [--out DIR]   one solve -> trace.csv (+ image)
    genprior sweep    --config c.txt [--out DIR]   m x seed x solver grid -> results.csv
    genprior diagnose --config c.txt [--out DIR]   restricted-constant estimates

Configs are flat ``key = value`` text files ('#' starts a comment).  Every
key is validated against the schema below before any computation runs;
unknown keys are rejected with the offending file and line.  Any key can be
overridden on the command line with ``--set key=value``; ``--seed``,
``--out`` and ``--workers`` are shorthands for the keys of the same name.
The default output directory comes from ``$GENPRIOR_OUT``, else ``./out``.

Outputs are deterministic byte-for-byte given the config: CSV floats are
written with 17 significant digits, sweep rows in (m, seed, solver) order,
and wall-clock timings go to a separate ``timings.txt`` sidecar so the
result tables diff clean across reruns.  Reconstructions are written as
plain-text PGM (P2) images when the signal length is a perfect square,
min-max scaled to 0..255 with the scaling range recorded in the summary.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np

from . import diagnostics as diag
from .generator import (
    estimate_diameter,
    forward,
    load_weights,
    random_generator,
    save_weights,
)
from .measurement import MeasurementModel, Observation, observe, observe_noisy
from .numerics import RngStream, gaussian_matrix
from .objectives import GRADIENT_SCALE, objective_for
from .projection import ProjectionConfig
from .solvers import (
    SolverConfig,
    csgm_baseline,
    dpr_baseline,
    eps_pgd,
    myopic_eps_pgd,
    pgd_linear,
    phase_init,
    phase_pgd,
)

__all__ = ["main", "entrypoint", "ConfigError", "ExperimentConfig", "load_config"]

PROBLEMS = ("linear", "sinusoid", "sigmoid", "phase", "mismatch")
SOLVERS = ("pgd", "eps_pgd", "phase_pgd", "myopic", "csgm", "dpr")

PROBLEM_LINK = {
    "linear": "linear",
    "sinusoid": "sinusoid",
    "sigmoid": "sigmoid",
    "phase": "magnitude",
    "mismatch": "linear",
}

DEFAULT_SOLVER = {
    "linear": "pgd",
    "sinusoid": "eps_pgd",
    "sigmoid": "eps_pgd",
    "phase": "phase_pgd",
    "mismatch": "myopic",
}

SOLVERS_FOR_PROBLEM = {
    "linear": ("pgd", "eps_pgd", "csgm"),
    "sinusoid": ("eps_pgd",),
    "sigmoid": ("eps_pgd",),
    "phase": ("phase_pgd", "dpr"),
    "mismatch": ("myopic",),
}

RATE_FLOOR = 1e-8


class ConfigError(Exception):
    """Invalid experiment configuration; message carries file:line context."""


def _parse_bool(s):
    if s.lower() in ("true", "yes", "1", "on"):
        return True
    if s.lower() in ("false", "no", "0", "off"):
        return False
    raise ValueError(f"not a boolean: {s!r}")


def _parse_int_list(s):
    return tuple(int(tok) for tok in s.split(",") if tok.strip() != "")


def _parse_str_list(s):
    return tuple(tok.strip() for tok in s.split(",") if tok.strip() != "")


def _parse_eta(s):
    if s.strip().lower() == "auto":
        return "auto"
    return float(s)


# key -> (parser, default).  Defaults follow the reference experimental
# protocol: eta 0.5 (0.9 for phase problems), 15 outer and 200 inner steps.
_SCHEMA = {
    "problem": (str, "linear"),
    "latent_dim": (int, 20),
    "hidden_dims": (_parse_int_list, (200,)),
    "output_dim": (int, 784),
    "activation": (str, "relu"),
    "weight_scale": (float, 1.0),
    "bias_scale": (float, 0.0),
    "weight_seed": (int, 0),
    "weights_path": (str, ""),
    "weights_out": (str, "generator.gpw"),
    "m": (int, 100),
    "m_list": (_parse_int_list, ()),
    "matrix_kind": (str, "gaussian"),
    "solver": (str, ""),
    "solvers": (_parse_str_list, ()),
    "eta": (_parse_eta, None),
    "outer_steps": (int, 15),
    "inner_steps": (int, 200),
    "inner_rate": (float, 0.01),
    "restarts": (int, 1),
    "proj_init": (str, "random"),
    "seed": (int, 0),
    "seeds": (_parse_int_list, ()),
    "unit_norm_latent": (_parse_bool, False),
    "noise_std": (float, 0.0),
    "sparsity": (int, 5),
    "spike_scale": (float, 5.0),
    "basis": (str, "identity"),
    "csgm_steps": (int, 3000),
    "csgm_rate": (float, 0.01),
    "dpr_steps": (int, 2500),
    "dpr_rate": (float, 0.01),
    "phase_init_strategy": (str, "best_of_samples"),
    "phase_init_count": (int, 100),
    "phase_delta0": (float, 0.1),
    "num_pairs": (int, 500),
    "image": (_parse_bool, True),
    "out": (str, ""),
    "workers": (int, 1),
}


@dataclass(frozen=True)
class ExperimentConfig:
    problem: str
    latent_dim: int
    hidden_dims: tuple
    output_dim: int
    activation: str
    weight_scale: float
    bias_scale: float
    weight_seed: int
    weights_path: str
    weights_out: str
    m: int
    m_list: tuple
    matrix_kind: str
    solver: str
    solvers: tuple
    eta: object
    outer_steps: int
    inner_steps: int
    inner_rate: float
    restarts: int
    proj_init: str
    seed: int
    seeds: tuple
    unit_norm_latent: bool
    noise_std: float
    sparsity: int
    spike_scale: float
    basis: str
    csgm_steps: int
    csgm_rate: float
    dpr_steps: int
    dpr_rate: float
    phase_init_strategy: str
    phase_init_count: int
    phase_delta0: float
    num_pairs: int
    image: bool
    out: str
    workers: int

    def solver_list(self):
        if self.solvers:
            return self.solvers
        if self.solver:
            return (self.solver,)
        return (DEFAULT_SOLVER[self.problem],)

    def eta_value(self):
        """Configured step size; problem-dependent default when unset."""
        if self.eta is None:
            return 0.9 if self.problem == "phase" else 0.5
        return self.eta

    def seed_list(self):
        return self.seeds if self.seeds else (self.seed,)

    def m_values(self):
        return self.m_list if self.m_list else (self.m,)


def _validate(cfg):
    if cfg.problem not in PROBLEMS:
        raise ConfigError(f"problem must be one of {PROBLEMS}, got {cfg.problem!r}")
    if cfg.activation not in ("relu", "tanh", "identity"):
        raise ConfigError(f"unknown activation {cfg.activation!r}")
    if cfg.latent_dim < 1 or cfg.output_dim < 1:
        raise ConfigError("latent_dim and output_dim must be positive")
    if any(h < 1 for h in cfg.hidden_dims):
        raise ConfigError("hidden_dims entries must be positive")
    if cfg.m < 1 or any(m < 1 for m in cfg.m_list):
        raise ConfigError("measurement counts must be positive")
    if cfg.matrix_kind not in ("gaussian", "orthonormal"):
        raise ConfigError("matrix_kind must be 'gaussian' or 'orthonormal'")
    if cfg.outer_steps < 1 or cfg.inner_steps < 1 or cfg.restarts < 1:
        raise ConfigError("outer_steps, inner_steps and restarts must be >= 1")
    if cfg.inner_rate <= 0:
        raise ConfigError("inner_rate must be positive")
    if isinstance(cfg.eta, float) and cfg.eta <= 0:
        raise ConfigError("eta must be positive (or 'auto')")
    if cfg.proj_init not in ("zero", "random"):
        raise ConfigError("proj_init must be 'zero' or 'random'")
    if cfg.noise_std < 0:
        raise ConfigError("noise_std must be nonnegative")
    if cfg.sparsity < 0:
        raise ConfigError("sparsity must be nonnegative")
    if cfg.basis not in ("identity", "random_ortho"):
        raise ConfigError("basis must be 'identity' or 'random_ortho'")
    if cfg.phase_init_strategy not in ("best_of_samples", "oracle_perturb"):
        raise ConfigError("phase_init_strategy must be 'best_of_samples' or "
                          "'oracle_perturb'")
    if cfg.num_pairs < 1:
        raise ConfigError("num_pairs must be >= 1")
    if cfg.workers < 1:
        raise ConfigError("workers must be >= 1")
    allowed = SOLVERS_FOR_PROBLEM[cfg.problem]
    for s in cfg.solver_list():
        if s not in SOLVERS:
            raise ConfigError(f"unknown solver {s!r} (choose from {SOLVERS})")
        if s not in allowed:
            raise ConfigError(
                f"solver {s!r} does not apply to problem {cfg.problem!r} "
                f"(choose from {allowed})"
            )
    return cfg


def load_config(path=None, overrides=(), seed=None, out=None, workers=None):
    """Assemble an ExperimentConfig from file, --set overrides and flags."""
    values = {k: default for k, (_, default) in _SCHEMA.items()}
    if path:
        for lineno, key, raw in _read_config_lines(path):
            if key not in _SCHEMA:
                raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
            parser, _ = _SCHEMA[key]
            try:
                values[key] = parser(raw)
            except ValueError as exc:
                raise ConfigError(f"{path}:{lineno}: bad value for {key}: {exc}")
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"--set expects key=value, got {item!r}")
        key, raw = item.split("=", 1)
        key = key.strip()
        if key not in _SCHEMA:
            raise ConfigError(f"--set: unknown key {key!r}")
        parser, _ = _SCHEMA[key]
        try:
            values[key] = parser(raw.strip())
        except ValueError as exc:
            raise ConfigError(f"--set {key}: bad value: {exc}")
    if seed is not None:
        values["seed"] = int(seed)
    if out is not None:
        values["out"] = str(out)
    if workers is not None:
        values["workers"] = int(workers)
    if not values["out"]:
        values["out"] = os.environ.get("GENPRIOR_OUT", "out")
    cfg = ExperimentConfig(**{f.name: values[f.name] for f in fields(ExperimentConfig)})
    return _validate(cfg)


def _read_config_lines(path):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}")
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {line!r}")
        key, raw = stripped.split("=", 1)
        yield lineno, key.strip(), raw.strip()


# ---------------------------------------------------------------------------
# instance construction


def build_generator(cfg):
    if cfg.weights_path:
        return load_weights(cfg.weights_path)
    rng = RngStream(cfg.weight_seed, spawn_key=(901,))
    return random_generator(cfg.latent_dim, cfg.hidden_dims, cfg.output_dim,
                            cfg.activation, rng, weight_scale=cfg.weight_scale,
                            bias_scale=cfg.bias_scale)


def build_basis(cfg, n):
    if cfg.basis == "identity":
        return np.eye(n)
    q, r = np.linalg.qr(RngStream(cfg.weight_seed, spawn_key=(902,))
                        .standard_normal((n, n)))
    return q * np.sign(np.diag(r))  # fix signs so the draw is canonical


@dataclass(frozen=True)
class Instance:
    observation: Observation
    basis: np.ndarray | None = None
    v_star: np.ndarray | None = None


def build_instance(cfg, net, m, seed):
    """Planted problem: x* = G(z*) (+ sparse spikes for mismatch).

    The target depends only on the seed; the sensing matrix depends on
    (seed, m) so each sweep column sees fresh measurements of the same
    signal.
    """
    root = RngStream(seed)
    z_star = root.derive(0).standard_normal(net.latent_dim)
    if cfg.unit_norm_latent:
        z_star = z_star / np.linalg.norm(z_star)
    x_base = forward(net, z_star)
    basis = None
    v_star = None
    x_star = x_base
    if cfg.problem == "mismatch":
        basis = build_basis(cfg, net.output_dim)
        spike_rng = root.derive(2)
        support = spike_rng.permutation(net.output_dim)[: cfg.sparsity]
        scale = cfg.spike_scale * np.linalg.norm(x_base) / np.sqrt(net.output_dim)
        coeffs = np.zeros(net.output_dim)
        coeffs[support] = scale * np.where(
            spike_rng.standard_normal(cfg.sparsity) >= 0, 1.0, -1.0
        )
        v_star = basis @ coeffs
        x_star = x_base + v_star
    n = net.output_dim
    if cfg.matrix_kind == "orthonormal":
        if m > n:
            raise ConfigError("orthonormal matrix_kind needs m <= output_dim")
        q, r = np.linalg.qr(root.derive(1, m).standard_normal((n, n)))
        a = (q * np.sign(np.diag(r))).T[:m]
    else:
        a = gaussian_matrix(m, n, 1.0 / m, root.derive(1, m))
    model = MeasurementModel(matrix=a, link=PROBLEM_LINK[cfg.problem])
    if cfg.noise_std > 0:
        y = observe_noisy(model, x_star, cfg.noise_std, root.derive(3))
    else:
        y = observe(model, x_star)
    obs = Observation(y=y, model=model, x_star=x_star, z_star=z_star)
    return Instance(observation=obs, basis=basis, v_star=v_star)


def _solver_config(cfg, eta, seed, x_star):
    proj = ProjectionConfig(inner_steps=cfg.inner_steps, inner_rate=cfg.inner_rate,
                            restarts=cfg.restarts, init=cfg.proj_init)
    return SolverConfig(outer_steps=cfg.outer_steps, step_size=eta,
                        projection=proj, seed=seed, ground_truth=x_star)


def _diagnostic_objective(model, y):
    """Objective for curvature probes; magnitude links get a unit phase
    (the quadratic curvature of ||y*p - Ax||^2 does not depend on p)."""
    if model.link == "magnitude":
        return objective_for(model, y, phase=np.ones(model.num_measurements))
    return objective_for(model, y)


def resolve_eta(cfg, inst, net, seed):
    """Step size from config; 'auto' uses 1/beta of the solver's potential."""
    eta = cfg.eta_value()
    if eta != "auto":
        return float(eta)
    obj = _diagnostic_objective(inst.observation.model, inst.observation.y)
    est = diag.rsc_rss_estimate(obj, net, cfg.num_pairs,
                                RngStream(seed, spawn_key=(903,)))
    return 1.0 / (GRADIENT_SCALE[obj.kind] * est.beta)


def run_cell(cfg, net, m, seed, solver):
    """One (m, seed, solver) run; returns the trace plus summary fields."""
    inst = build_instance(cfg, net, m, seed)
    obs = inst.observation
    eta = resolve_eta(cfg, inst, net, seed)
    scfg = _solver_config(cfg, eta, seed, obs.x_star)
    t0 = time.perf_counter()
    if solver == "pgd":
        _, trace = pgd_linear(obs.y, obs.model.matrix, net, scfg)
    elif solver == "eps_pgd":
        obj = objective_for(obs.model, obs.y)
        _, trace = eps_pgd(obj, net, scfg)
    elif solver == "phase_pgd":
        init_rng = RngStream(seed, spawn_key=(904,))
        if cfg.phase_init_strategy == "oracle_perturb":
            x0 = phase_init(obs.y, obs.model.matrix, net, init_rng,
                            strategy="oracle_perturb", delta0=cfg.phase_delta0,
                            x_star=obs.x_star)
        else:
            x0 = phase_init(obs.y, obs.model.matrix, net, init_rng,
                            strategy="best_of_samples", count=cfg.phase_init_count)
        _, trace = phase_pgd(obs.y, obs.model.matrix, net, scfg, x0)
    elif solver == "myopic":
        obj = objective_for(obs.model, obs.y)
        _, _, _, trace = myopic_eps_pgd(obj, net, inst.basis, cfg.sparsity, scfg)
    elif solver == "csgm":
        _, trace = csgm_baseline(obs.y, obs.model.matrix, net, cfg.csgm_steps,
                                 cfg.csgm_rate, RngStream(seed, spawn_key=(905,)),
                                 x_star=obs.x_star)
    elif solver == "dpr":
        _, trace = dpr_baseline(obs.y, obs.model.matrix, net, cfg.dpr_steps,
                                cfg.dpr_rate, RngStream(seed, spawn_key=(905,)),
                                x_star=obs.x_star)
    else:
        raise ConfigError(f"unknown solver {solver!r}")
    wall = time.perf_counter() - t0
    try:
        alpha_fit = diag.convergence_rate(trace, RATE_FLOOR).alpha_fit
    except ValueError:
        alpha_fit = float("nan")
    return {
        "m": m,
        "seed": seed,
        "solver": solver,
        "trace": trace,
        "eta": eta,
        "final_per_pixel_error": trace.final_per_pixel_error,
        "final_objective": trace.final_objective,
        "alpha_fit": alpha_fit,
        "total_inner_updates": trace.inner_updates,
        "wall_time_s": wall,
    }


# ---------------------------------------------------------------------------
# output writers


def _fmt(v):
    if isinstance(v, float):
        return f"{v:.17g}"
    return str(v)


def write_csv(path, header, rows):
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    Path(path).write_text("\n".join(lines) + "\n")


def write_trace_csv(path, trace):
    header = ["t", "F", "per_pixel_error", "sign_invariant_error",
              "proj_residual", "phase_flips"]
    rows = []
    for t in range(len(trace)):
        rows.append([t, float(trace.objective[t]), float(trace.per_pixel_error[t]),
                     float(trace.sign_error[t]), float(trace.proj_residual[t]),
                     float(trace.phase_flips[t])])
    write_csv(path, header, rows)


def write_pgm(path, x):
    """Plain-text PGM (P2), min-max scaled to 0..255; returns (lo, hi)."""
    side = math.isqrt(x.shape[0])
    if side * side != x.shape[0]:
        raise ValueError("image output needs a perfect-square signal length")
    lo, hi = float(np.min(x)), float(np.max(x))
    if hi - lo > 0:
        pix = np.rint((x - lo) / (hi - lo) * 255).astype(int)
    else:
        pix = np.zeros(x.shape[0], dtype=int)
    lines = ["P2", f"{side} {side}", "255"]
    grid = pix.reshape(side, side)
    lines.extend(" ".join(str(v) for v in row) for row in grid)
    Path(path).write_text("\n".join(lines) + "\n")
    return lo, hi


def _ensure_out(cfg):
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


# ---------------------------------------------------------------------------
# subcommands


def cmd_gen(cfg):
    out = _ensure_out(cfg)
    net = build_generator(cfg)
    path = out / cfg.weights_out
    save_weights(net, path)
    diameter = estimate_diameter(net, 200, RngStream(cfg.seed, spawn_key=(906,)))
    print(f"wrote {path}")
    print(f"latent_dim={net.latent_dim} output_dim={net.output_dim} "
          f"depth={net.depth} est_diameter={diameter:.6g}")
    return 0


def cmd_solve(cfg):
    out = _ensure_out(cfg)
    net = build_generator(cfg)
    cell = run_cell(cfg, net, cfg.m, cfg.seed, cfg.solver_list()[0])
    trace = cell["trace"]
    trace_path = out / "trace.csv"
    write_trace_csv(trace_path, trace)
    summary = {
        "problem": cfg.problem,
        "solver": cell["solver"],
        "m": cell["m"],
        "seed": cell["seed"],
        "eta": cell["eta"],
        "final_objective": cell["final_objective"],
        "final_per_pixel_error": cell["final_per_pixel_error"],
        "alpha_fit": cell["alpha_fit"],
        "total_inner_updates": cell["total_inner_updates"],
        "wall_time_s": cell["wall_time_s"],
    }
    side = math.isqrt(net.output_dim)
    if cfg.image and side * side == net.output_dim:
        lo, hi = write_pgm(out / "x_hat.pgm", trace.x_hat)
        summary["image"] = "x_hat.pgm"
        summary["image_scale_lo"] = lo
        summary["image_scale_hi"] = hi
    summary_line = " ".join(f"{k}={_fmt(v)}" for k, v in summary.items())
    (out / "summary.txt").write_text(summary_line + "\n")
    print(summary_line)
    print(f"wrote {trace_path}")
    return 0


RESULT_COLUMNS = ("m", "seed", "solver", "final_per_pixel_error",
                  "final_objective", "alpha_fit", "total_inner_updates")


def cmd_sweep(cfg):
    out = _ensure_out(cfg)
    net = build_generator(cfg)
    cells = [(m, seed, solver)
             for m in cfg.m_values()
             for seed in cfg.seed_list()
             for solver in cfg.solver_list()]
    if cfg.workers > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            results = list(pool.map(
                lambda c: run_cell(cfg, net, c[0], c[1], c[2]), cells))
    else:
        results = [run_cell(cfg, net, m, seed, solver) for m, seed, solver in cells]

    order = sorted(range(len(cells)), key=lambda i: (
        cells[i][0], cells[i][1], cfg.solver_list().index(cells[i][2])))
    rows = []
    for i in order:
        r = results[i]
        rows.append([r[c] for c in RESULT_COLUMNS])
    # Per-(m, solver) medians of the error/objective columns, appended after
    # the per-cell rows with seed column 'median'.
    for m in cfg.m_values():
        for solver in cfg.solver_list():
            sel = [r for r in results if r["m"] == m and r["solver"] == solver]
            rows.append([
                m, "median", solver,
                float(np.median([r["final_per_pixel_error"] for r in sel])),
                float(np.median([r["final_objective"] for r in sel])),
                float(np.median([r["alpha_fit"] for r in sel])),
                int(np.median([r["total_inner_updates"] for r in sel])),
            ])
    results_path = out / "results.csv"
    write_csv(results_path, RESULT_COLUMNS, rows)
    # Wall-clock lives in a text sidecar, not the CSV: result tables must
    # diff clean across reruns of the same config.
    timing_lines = ["m seed solver wall_time_s"]
    timing_lines += [
        f"{cells[i][0]} {cells[i][1]} {cells[i][2]} "
        f"{results[i]['wall_time_s']:.6f}" for i in order
    ]
    (out / "timings.txt").write_text("\n".join(timing_lines) + "\n")
    print(f"wrote {results_path} ({len(rows)} rows)")
    return 0


def cmd_diagnose(cfg):
    out = _ensure_out(cfg)
    net = build_generator(cfg)
    inst = build_instance(cfg, net, cfg.m, cfg.seed)
    obs = inst.observation
    rng = RngStream(cfg.seed, spawn_key=(907,))
    eta = resolve_eta(cfg, inst, net, cfg.seed)

    report = {}
    srec = diag.empirical_srec(obs.model.matrix, net, cfg.num_pairs, rng.derive(0))
    report["gamma_hat"] = srec.gamma
    report["rho_hat"] = srec.rho
    report["pairs_used"] = srec.pairs_used

    obj = _diagnostic_objective(obs.model, obs.y)
    est = diag.rsc_rss_estimate(obj, net, cfg.num_pairs, rng.derive(1))
    report["alpha_hat"] = est.alpha
    report["beta_hat"] = est.beta
    report["beta_over_alpha"] = est.ratio
    bound, active = diag.contraction_bound_general(est)
    report["predicted_gap_factor"] = bound
    report["predicted_gap_factor_source"] = active

    basis = inst.basis if inst.basis is not None else np.eye(net.output_dim)
    mu = diag.incoherence_estimate(net, basis, min(cfg.num_pairs, 200),
                                   rng.derive(2), sparsity=max(cfg.sparsity, 1))
    report["mu_hat"] = mu
    if cfg.problem == "mismatch":
        report["predicted_mismatch_factor"] = diag.contraction_bound_mismatch(est, mu)

    window = diag.step_size_window_check(srec, eta)
    report["eta"] = eta
    report["eta_in_window"] = window.in_window
    report["rho_sq_below_inv_eta"] = window.rho_sq_ok
    report["window_predicted_factor"] = window.predicted_factor

    cell = run_cell(cfg, net, cfg.m, cfg.seed, cfg.solver_list()[0])
    report["solver"] = cell["solver"]
    report["fitted_alpha"] = cell["alpha_fit"]
    report["final_per_pixel_error"] = cell["final_per_pixel_error"]

    for k, v in report.items():
        print(f"{k} = {_fmt(v)}")
    write_csv(out / "diagnostics.csv", ("key", "value"),
              [[k, v] for k, v in report.items()])
    print(f"wrote {out / 'diagnostics.csv'}")
    return 0


# ---------------------------------------------------------------------------
# entry point


def _add_common(p):
    p.add_argument("--config", default=None, help="flat key=value config file")
    p.add_argument("--set", dest="overrides", action="append", default=[],
                   metavar="KEY=VALUE", help="override a config key")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", default=None)
    p.add_argument("--workers", type=int, default=None)


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="genprior",
        description="Reconstruction experiments under a generative prior.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in (("gen", cmd_gen), ("solve", cmd_solve),
                     ("sweep", cmd_sweep), ("diagnose", cmd_diagnose)):
        p = sub.add_parser(name)
        _add_common(p)
        p.set_defaults(fn=fn)
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args.config, args.overrides, seed=args.seed,
                          out=args.out, workers=args.workers)
        return args.fn(cfg)
    except (ConfigError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entrypoint():
    raise SystemExit(main())


if __name__ == "__main__":
    entrypoint()
