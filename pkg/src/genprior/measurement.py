"""Forward observation models.

A model is a dense matrix A together with a link applied entrywise to Ax:

    linear     y = Ax
    sinusoid   y = Ax + sin(Ax)
    sigmoid    y = 1 / (1 + exp(-Ax))
    magnitude  y = |Ax|

The magnitude model keeps no phase information; recovering the signs is the
solver's job.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from .numerics import as_matrix, as_vector

__all__ = ["LINKS", "MeasurementModel", "Observation", "observe", "observe_noisy"]

LINKS = ("linear", "sinusoid", "sigmoid", "magnitude")


@dataclass(frozen=True)
class MeasurementModel:
    matrix: np.ndarray  # A, shape (m, n)
    link: str

    def __post_init__(self):
        a = as_matrix(self.matrix, "measurement matrix")
        if self.link not in LINKS:
            raise ValueError(f"unknown link {self.link!r}")
        object.__setattr__(self, "matrix", a)

    @property
    def num_measurements(self):
        return self.matrix.shape[0]

    @property
    def signal_dim(self):
        return self.matrix.shape[1]


@dataclass(frozen=True)
class Observation:
    """Measurements plus the model that produced them.

    For synthetic instances the planted ground truth (x_star, and z_star
    when the target is in range) rides along so traces can report errors.
    """

    y: np.ndarray
    model: MeasurementModel
    x_star: np.ndarray | None = None
    z_star: np.ndarray | None = None


def apply_link(link, u):
    if link == "linear":
        return u
    if link == "sinusoid":
        return u + np.sin(u)
    if link == "sigmoid":
        return expit(u)
    if link == "magnitude":
        return np.abs(u)
    raise ValueError(f"unknown link {link!r}")


def observe(model, x):
    """Clean measurements: the link applied entrywise to Ax."""
    x = as_vector(x, "x")
    if x.shape[0] != model.signal_dim:
        raise ValueError(
            f"signal length {x.shape[0]} does not match model n={model.signal_dim}"
        )
    return apply_link(model.link, model.matrix @ x)


def observe_noisy(model, x, noise_std, rng):
    """Measurements with additive i.i.d. Gaussian(0, noise_std^2) noise."""
    if noise_std < 0:
        raise ValueError(f"noise_std must be nonnegative, got {noise_std}")
    y = observe(model, x)
    if noise_std == 0:
        return y
    return y + noise_std * rng.standard_normal(model.num_measurements)
