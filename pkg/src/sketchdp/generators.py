"""Synthetic matrix generation for experiments.

Four families:

* ``low_mu0`` - exact rank-R product of flat orthonormal factors (random
  signs, orthonormalized), giving subspace coherence close to its minimum.
* ``spiked`` - a single random unit row among zeros: maximal row coherence.
* ``power_law`` - full spectrum sigma_j proportional to j^(-decay) with
  random orthonormal factors.
* ``netflix_like`` - sparse integer ratings whose density and heavy-row
  share scale the published statistics of the canonical movie-ratings
  matrix (about 1.1% of entries nonzero, the busiest row holding about
  40x the average row's count) down to the requested shape.

Low-rank kinds are scaled so that ||A||_F = sqrt(rank * n), the regime in
which plain input perturbation stops giving non-trivial error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .rng import (
    STREAM_GENERATOR,
    STREAM_GENERATOR_ALT,
    check_seed,
    gaussian_matrix,
    uniform_stream,
)

KINDS = ("low_mu0", "spiked", "power_law", "netflix_like")

# Published statistics of the reference ratings matrix: total ratings,
# native row count, and the count held by the most-rated row.
_NETFLIX_TOTAL = 100_480_507
_NETFLIX_ROWS = 17_770
_NETFLIX_MAX_ROW = 227_715
NETFLIX_DENSITY = 0.011
HEAVY_ROW_RATIO = _NETFLIX_MAX_ROW * _NETFLIX_ROWS / _NETFLIX_TOTAL  # ~40.3x average


@dataclass(frozen=True)
class GeneratorSpec:
    kind: str
    m: int
    n: int
    rank: int
    spectrum_decay: float = 1.0
    density: float = NETFLIX_DENSITY
    value_range: tuple[int, int] = (1, 5)
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "m", int(self.m))
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "rank", int(self.rank))
        object.__setattr__(self, "spectrum_decay", float(self.spectrum_decay))
        object.__setattr__(self, "density", float(self.density))
        object.__setattr__(
            self, "value_range", (int(self.value_range[0]), int(self.value_range[1]))
        )
        object.__setattr__(self, "seed", check_seed(self.seed))
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if self.m < 1 or self.n < 1:
            raise ValueError(f"shape must be positive, got {self.m}x{self.n}")
        if not 1 <= self.rank <= min(self.m, self.n):
            raise ValueError(
                f"rank must lie in [1, min(m, n)], got {self.rank} for {self.m}x{self.n}"
            )
        if self.spectrum_decay <= 0:
            raise ValueError(f"spectrum_decay must be positive, got {self.spectrum_decay}")
        if not 0.0 < self.density <= 1.0:
            raise ValueError(f"density must lie in (0, 1], got {self.density}")
        # density only governs the sparse kind; dense kinds ignore it
        if self.kind == "netflix_like" and self.density * self.m * self.n < self.rank:
            raise ValueError(
                "density too small to realize the requested rank: "
                f"density*m*n = {self.density * self.m * self.n:.3f} < rank = {self.rank}"
            )
        if self.value_range[0] > self.value_range[1]:
            raise ValueError(f"value_range must be ordered, got {self.value_range}")


def _orthonormal_columns(rows: int, cols: int, seed, stream: int) -> np.ndarray:
    """Orthonormal factor from a Gaussian draw via QR, signs canonicalized."""
    g = gaussian_matrix(rows, cols, 0.0, 1.0, seed, stream)
    q, r = np.linalg.qr(g)
    signs = np.sign(np.diag(r))
    signs[signs == 0] = 1.0
    return q * signs


def _flat_orthonormal_columns(rows: int, cols: int, seed, stream: int) -> np.ndarray:
    """Orthonormal factor with near-uniform row norms (random sign pattern)."""
    u = uniform_stream(seed, stream, rows * cols).reshape(rows, cols)
    signs = np.where(u < 0.5, -1.0, 1.0) / math.sqrt(rows)
    q, r = np.linalg.qr(signs)
    diag = np.sign(np.diag(r))
    diag[diag == 0] = 1.0
    return q * diag


def _low_mu0(spec: GeneratorSpec) -> np.ndarray:
    u = _flat_orthonormal_columns(spec.m, spec.rank, spec.seed, STREAM_GENERATOR)
    v = _flat_orthonormal_columns(spec.n, spec.rank, spec.seed, STREAM_GENERATOR_ALT)
    sigma = math.sqrt(spec.n)
    return (u * sigma) @ v.T


def _spiked(spec: GeneratorSpec) -> np.ndarray:
    row = gaussian_matrix(1, spec.n, 0.0, 1.0, spec.seed, STREAM_GENERATOR)
    row = row / np.linalg.norm(row)
    a = np.zeros((spec.m, spec.n))
    a[0] = row
    return a


def _power_law(spec: GeneratorSpec) -> np.ndarray:
    d = min(spec.m, spec.n)
    u = _orthonormal_columns(spec.m, d, spec.seed, STREAM_GENERATOR)
    v = _orthonormal_columns(spec.n, d, spec.seed, STREAM_GENERATOR_ALT)
    sigma = np.arange(1, d + 1, dtype=np.float64) ** (-spec.spectrum_decay)
    sigma *= math.sqrt(spec.rank * spec.n) / np.linalg.norm(sigma)
    return (u * sigma) @ v.T


def _netflix_like(spec: GeneratorSpec) -> np.ndarray:
    m, n = spec.m, spec.n
    total = int(round(spec.density * m * n))
    total = max(spec.rank, min(total, m * n))

    counts = np.zeros(m, dtype=np.int64)
    heavy = min(n, total, max(1, int(round(HEAVY_ROW_RATIO * total / m))))
    counts[0] = heavy
    remaining = total - heavy
    if m > 1 and remaining > 0:
        base, extra = divmod(remaining, m - 1)
        counts[1:] = base
        counts[1 : 1 + extra] += 1
    elif remaining > 0:
        counts[0] = min(n, counts[0] + remaining)
    # clamp at row capacity and push overflow onto later rows
    overflow = 0
    for i in range(m):
        counts[i] += overflow
        overflow = max(0, counts[i] - n)
        counts[i] = min(counts[i], n)

    position_u = uniform_stream(spec.seed, STREAM_GENERATOR, m * n).reshape(m, n)
    value_u = uniform_stream(spec.seed, STREAM_GENERATOR_ALT, m * n).reshape(m, n)
    lo, hi = spec.value_range
    span = hi - lo + 1
    a = np.zeros((m, n))
    for i in range(m):
        c = int(counts[i])
        if c == 0:
            continue
        cols = np.argsort(position_u[i], kind="stable")[:c]
        vals = np.minimum(np.floor(value_u[i, cols] * span), span - 1) + lo
        a[i, cols] = vals
    return a


def generate(spec: GeneratorSpec) -> np.ndarray:
    """Generate the matrix described by `spec`, deterministically in its seed."""
    if spec.kind == "low_mu0":
        return _low_mu0(spec)
    if spec.kind == "spiked":
        return _spiked(spec)
    if spec.kind == "power_law":
        return _power_law(spec)
    return _netflix_like(spec)
