import numpy as np
import pytest

from sketchdp import gaussian_matrix, gram_schmidt


def random_matrix(m, n, seed, scale=1.0):
    return gaussian_matrix(m, n, 0.0, scale, seed)


def rank_r_matrix(m, n, r, seed, scale=1.0):
    """Exact rank-r product of orthonormal factors with flat spectrum."""
    u = gram_schmidt(gaussian_matrix(m, r, 0.0, 1.0, seed, stream=11))
    v = gram_schmidt(gaussian_matrix(n, r, 0.0, 1.0, seed, stream=12))
    return (u * scale) @ v.T


@pytest.fixture
def rng_seeds():
    return list(range(20))


def max_abs(a):
    return float(np.max(np.abs(a)))
