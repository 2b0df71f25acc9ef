"""Deterministic seeded Gaussian sampling.

Every random draw in this package flows through a counter-based Philox
stream keyed by ``(seed, stream)``. Normal variates are produced by a
Box-Muller transform of the raw 64-bit uniform stream, so a fixed
(seed, stream, shape) request is bitwise reproducible: no global RNG
state exists anywhere.
"""

from __future__ import annotations

import numpy as np

MAX_SEED = 2**64 - 1

# Stream ids (second word of the Philox key). Distinct consumers draw from
# distinct streams so that e.g. the sketch matrix of a run never overlaps
# with its noise, and adding noise never perturbs the sketch draw.
STREAM_DEFAULT = 0
STREAM_SKETCH = 1
STREAM_RANGE_NOISE = 2
STREAM_PROJECTION_NOISE = 3
STREAM_RESPONSE_NOISE = 4
STREAM_GENERATOR = 5
STREAM_GENERATOR_ALT = 6
STREAM_POWER_START = 7
STREAM_ATTACK = 8

_INV_2_53 = 2.0 ** -53


def check_seed(seed) -> int:
    """Validate a 64-bit unsigned seed and return it as a plain int."""
    if isinstance(seed, bool) or not isinstance(seed, (int, np.integer)):
        raise TypeError(f"seed must be an integer, got {type(seed).__name__}")
    seed = int(seed)
    if not 0 <= seed <= MAX_SEED:
        raise ValueError(f"seed must be in [0, 2^64), got {seed}")
    return seed


def uniform_stream(seed, stream: int, count: int) -> np.ndarray:
    """Return `count` uniforms in [0, 1) from the (seed, stream) Philox counter."""
    seed = check_seed(seed)
    key = np.array([seed, stream], dtype=np.uint64)
    raw = np.random.Philox(key=key).random_raw(count)
    return (raw >> np.uint64(11)).astype(np.float64) * _INV_2_53


def gaussian_matrix(rows, cols, mean, stddev, seed, stream: int = STREAM_DEFAULT):
    """rows x cols matrix of i.i.d. N(mean, stddev^2) entries.

    The entries are a Box-Muller transform of the seeded uniform stream;
    identical arguments always yield bitwise-identical matrices. A stddev
    of zero returns the constant matrix of `mean`.
    """
    rows = int(rows)
    cols = int(cols)
    if rows < 1 or cols < 1:
        raise ValueError(f"matrix shape must be positive, got {rows}x{cols}")
    mean = float(mean)
    stddev = float(stddev)
    if not np.isfinite(mean) or not np.isfinite(stddev):
        raise ValueError("mean and stddev must be finite")
    if stddev < 0:
        raise ValueError(f"stddev must be non-negative, got {stddev}")
    if stddev == 0.0:
        return np.full((rows, cols), mean)

    size = rows * cols
    npairs = (size + 1) // 2
    u = uniform_stream(seed, stream, 2 * npairs)
    # 1 - u lies in (0, 1], keeping the log finite.
    radius = np.sqrt(-2.0 * np.log(1.0 - u[:npairs]))
    theta = (2.0 * np.pi) * u[npairs:]
    z = np.empty(2 * npairs)
    z[0::2] = radius * np.cos(theta)
    z[1::2] = radius * np.sin(theta)
    out = mean + stddev * z[:size]
    return out.reshape(rows, cols)


def gaussian_vector(n, mean, stddev, seed, stream: int = STREAM_DEFAULT):
    """Length-n vector of i.i.d. N(mean, stddev^2) draws."""
    return gaussian_matrix(n, 1, mean, stddev, seed, stream).ravel()
