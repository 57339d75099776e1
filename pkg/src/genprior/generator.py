"""Fixed-weight multilayer generator networks.

The prior is a plain feed-forward stack of affine maps with entrywise
activations, mapping a latent vector of length ``k`` to a signal of length
``n``.  Weights are frozen at construction; there is no training here.
Forward evaluation and reverse-mode latent gradients are implemented
directly on numpy arrays.

Weight file format (little-endian, documented for interchange):

    bytes 0..7   magic b"GPRIORW1"
    uint32       number of layers d
    d records, each:
        uint32   in_dim
        uint32   out_dim
        uint8    activation tag (0=identity, 1=relu, 2=tanh)
        float64  weights, out_dim*in_dim values, row-major
        float64  bias, out_dim values

The byte stream is written exactly from the in-memory float64 arrays, so a
save/load round trip is bitwise exact.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .numerics import as_matrix, as_vector

__all__ = [
    "Layer",
    "GeneratorNet",
    "RangeSample",
    "forward",
    "latent_gradient",
    "sample_range",
    "random_generator",
    "identity_generator",
    "save_weights",
    "load_weights",
    "estimate_diameter",
]

ACTIVATIONS = ("identity", "relu", "tanh")
_ACT_TAG = {"identity": 0, "relu": 1, "tanh": 2}
_TAG_ACT = {v: k for k, v in _ACT_TAG.items()}

_MAGIC = b"GPRIORW1"


@dataclass(frozen=True)
class Layer:
    weights: np.ndarray  # (out_dim, in_dim)
    bias: np.ndarray     # (out_dim,)
    activation: str

    def __post_init__(self):
        w = as_matrix(self.weights, "layer weights")
        b = as_vector(self.bias, "layer bias")
        if b.shape[0] != w.shape[0]:
            raise ValueError(
                f"bias length {b.shape[0]} does not match weight rows {w.shape[0]}"
            )
        if self.activation not in ACTIVATIONS:
            raise ValueError(f"unknown activation {self.activation!r}")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "bias", b)

    @property
    def in_dim(self):
        return self.weights.shape[1]

    @property
    def out_dim(self):
        return self.weights.shape[0]


@dataclass(frozen=True)
class GeneratorNet:
    """Immutable generator: latent_dim -> ... -> output_dim."""

    layers: tuple

    def __post_init__(self):
        layers = tuple(self.layers)
        if not layers:
            raise ValueError("generator needs at least one layer")
        for prev, nxt in zip(layers, layers[1:]):
            if nxt.in_dim != prev.out_dim:
                raise ValueError(
                    f"layer dimension chain broken: {prev.out_dim} -> {nxt.in_dim}"
                )
        object.__setattr__(self, "layers", layers)

    @property
    def latent_dim(self):
        return self.layers[0].in_dim

    @property
    def output_dim(self):
        return self.layers[-1].out_dim

    @property
    def depth(self):
        return len(self.layers)

    def __call__(self, z):
        return forward(self, z)


@dataclass(frozen=True)
class RangeSample:
    """A latent draw together with its image under the generator."""

    z: np.ndarray
    x: np.ndarray


def _apply_activation(name, u):
    if name == "relu":
        return np.maximum(u, 0.0)
    if name == "tanh":
        return np.tanh(u)
    return u


def forward(net, z):
    """Evaluate the generator at ``z``.

    Accepts a single latent vector of shape (k,) or a batch of shape
    (batch, k); the output has matching leading shape.
    """
    h = np.asarray(z, dtype=np.float64)
    batched = h.ndim == 2
    if not batched and h.ndim != 1:
        raise ValueError(f"z must be 1-D or 2-D, got shape {h.shape}")
    if h.shape[-1] != net.latent_dim:
        raise ValueError(
            f"latent length {h.shape[-1]} does not match generator k={net.latent_dim}"
        )
    for layer in net.layers:
        h = h @ layer.weights.T + layer.bias
        h = _apply_activation(layer.activation, h)
    return h


def latent_gradient(net, z, cotangent):
    """Reverse-mode gradient of <cotangent, G(z)> with respect to z.

    The relu derivative at exactly 0 is taken to be 0.
    """
    z = as_vector(z, "z")
    g = np.asarray(cotangent, dtype=np.float64)
    if g.ndim != 1 or g.shape[0] != net.output_dim:
        raise ValueError(
            f"cotangent length {g.shape} does not match output dim {net.output_dim}"
        )
    if z.shape[0] != net.latent_dim:
        raise ValueError(
            f"latent length {z.shape[0]} does not match generator k={net.latent_dim}"
        )
    # Forward pass, keeping pre-activations for the backward sweep.
    pre = []
    h = z
    for layer in net.layers:
        u = layer.weights @ h + layer.bias
        pre.append(u)
        h = _apply_activation(layer.activation, u)
    # Backward sweep.
    for layer, u in zip(reversed(net.layers), reversed(pre)):
        if layer.activation == "relu":
            g = g * (u > 0.0)
        elif layer.activation == "tanh":
            g = g * (1.0 - np.tanh(u) ** 2)
        g = layer.weights.T @ g
    return g


def sample_range(net, rng, unit_norm=False):
    """Draw z ~ N(0, I_k), optionally rescale it to unit norm, return (z, G(z))."""
    z = rng.standard_normal(net.latent_dim)
    if unit_norm:
        nz = np.linalg.norm(z)
        if nz > 0:
            z = z / nz
    return RangeSample(z=z, x=forward(net, z))


def random_generator(k, hidden_dims, n, activation, rng, weight_scale=1.0,
                     bias_scale=0.0):
    """Random fixed-weight generator with the given dimension chain.

    Hidden layers use ``activation``; the output layer is affine (identity
    activation).  Weights are i.i.d. Gaussian(0, weight_scale^2 / fan_in),
    biases Gaussian(0, bias_scale^2); bias_scale defaults to 0 (bias-free).
    """
    dims = [int(k)] + [int(h) for h in hidden_dims] + [int(n)]
    if any(d < 1 for d in dims):
        raise ValueError(f"all layer dimensions must be positive, got {dims}")
    if activation not in ACTIVATIONS:
        raise ValueError(f"unknown activation {activation!r}")
    layers = []
    for i, (fan_in, fan_out) in enumerate(zip(dims, dims[1:])):
        w = (weight_scale / np.sqrt(fan_in)) * rng.standard_normal((fan_out, fan_in))
        b = bias_scale * rng.standard_normal(fan_out)
        act = activation if i < len(dims) - 2 else "identity"
        layers.append(Layer(weights=w, bias=b, activation=act))
    return GeneratorNet(layers=tuple(layers))


def identity_generator(n):
    """The generator G(z) = z on R^n; handy in tests and sanity checks."""
    return GeneratorNet(layers=(
        Layer(weights=np.eye(n), bias=np.zeros(n), activation="identity"),
    ))


def save_weights(net, path):
    """Write the generator to `path` in the documented binary format."""
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<I", net.depth))
        for layer in net.layers:
            fh.write(struct.pack("<IIB", layer.in_dim, layer.out_dim,
                                 _ACT_TAG[layer.activation]))
            fh.write(np.ascontiguousarray(layer.weights, dtype="<f8").tobytes())
            fh.write(np.ascontiguousarray(layer.bias, dtype="<f8").tobytes())


def load_weights(path):
    """Read a generator written by :func:`save_weights`."""
    with open(path, "rb") as fh:
        data = fh.read()
    if len(data) < len(_MAGIC) + 4 or data[: len(_MAGIC)] != _MAGIC:
        raise ValueError(f"{path}: not a generator weight file (bad magic)")
    off = len(_MAGIC)
    (depth,) = struct.unpack_from("<I", data, off)
    off += 4
    layers = []
    for i in range(depth):
        if off + 9 > len(data):
            raise ValueError(f"{path}: truncated layer header in layer {i}")
        in_dim, out_dim, tag = struct.unpack_from("<IIB", data, off)
        off += 9
        if tag not in _TAG_ACT:
            raise ValueError(f"{path}: unknown activation tag {tag} in layer {i}")
        nw = out_dim * in_dim
        need = (nw + out_dim) * 8
        if off + need > len(data):
            raise ValueError(f"{path}: truncated layer payload in layer {i}")
        w = np.frombuffer(data, dtype="<f8", count=nw, offset=off).reshape(
            out_dim, in_dim
        )
        off += nw * 8
        b = np.frombuffer(data, dtype="<f8", count=out_dim, offset=off)
        off += out_dim * 8
        layers.append(Layer(weights=w.copy(), bias=b.copy(),
                            activation=_TAG_ACT[tag]))
    if off != len(data):
        raise ValueError(f"{path}: {len(data) - off} trailing bytes after last layer")
    return GeneratorNet(layers=tuple(layers))


def estimate_diameter(net, num_samples, rng, unit_norm=False):
    """Max pairwise distance among sampled range points (lower bound on the
    true range diameter)."""
    num_samples = int(num_samples)
    if num_samples < 2:
        raise ValueError("need at least two samples to estimate a diameter")
    zs = rng.standard_normal((num_samples, net.latent_dim))
    if unit_norm:
        norms = np.linalg.norm(zs, axis=1, keepdims=True)
        zs = zs / np.where(norms > 0, norms, 1.0)
    xs = forward(net, zs)
    # Pairwise squared distances via the Gram expansion.
    sq = np.sum(xs**2, axis=1)
    d2 = sq[:, None] + sq[None, :] - 2.0 * (xs @ xs.T)
    return float(np.sqrt(max(np.max(d2), 0.0)))
