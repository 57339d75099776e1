import numpy as np
import pytest

from genprior import RngStream, forward, gaussian_matrix, random_generator


@pytest.fixture
def desk_net():
    """The workhorse planted-recovery generator: relu 8 -> 64 -> 128."""
    return random_generator(8, [64], 128, "relu", RngStream(7, spawn_key=(901,)))


@pytest.fixture
def toy2_net():
    """Small k=2 tanh generator whose latent plane a grid can cover."""
    return random_generator(2, [16], 32, "tanh", RngStream(11, spawn_key=(901,)))


def planted_linear(net, m, seed):
    """y = A G(z*) with the sensing matrix at the reference 1/m variance."""
    root = RngStream(seed)
    z_star = root.derive(0).standard_normal(net.latent_dim)
    x_star = forward(net, z_star)
    a = gaussian_matrix(m, net.output_dim, 1.0 / m, root.derive(1, m))
    return z_star, x_star, a, a @ x_star


def random_net(seed, k=3, hidden=(10,), n=12, activation="relu"):
    return random_generator(k, list(hidden), n, activation,
                            RngStream(seed, spawn_key=(77,)))
