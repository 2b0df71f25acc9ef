"""Reconstruction-attack lab.

A bit database is planted in the first k rows of an otherwise zero matrix,
a candidate release mechanism maps the matrix to a matrix, and rounding
the first k rows of the output attempts to recover the bits. Accurate
mechanisms are fully reconstructed; properly calibrated noise keeps the
recovered fraction near coin-flipping, which is exactly why high accuracy
and privacy cannot coexist on such inputs.

A mechanism handle is any callable (matrix, seed) -> matrix; helpers below
wrap the package's mechanisms in that interface.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import as_matrix
from .privacy import PrivacyBudget, randomized_response
from .rng import gaussian_matrix
from .sketch import SketchParams, pfp


@dataclass(frozen=True)
class AttackReport:
    mechanism_label: str
    recovered_fraction: float
    hamming_distance: int
    noise_sigma_effective: float


def check_bits(bits, k: int) -> np.ndarray:
    arr = np.asarray(bits)
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError("bits must be a non-empty 1-d sequence")
    if not np.all((arr == 0) | (arr == 1)):
        raise ValueError("bits must contain only 0 and 1")
    if arr.size % int(k) != 0:
        raise ValueError(f"bit count {arr.size} is not divisible by k={k}")
    return arr.astype(np.float64)


def encode_database(bits, m: int, k: int) -> np.ndarray:
    """Plant the bits row-major into the first k rows of an m x n zero matrix."""
    m = int(m)
    k = int(k)
    if k < 1:
        raise ValueError(f"k must be positive, got {k}")
    if m < k:
        raise ValueError(f"need m >= k, got m={m}, k={k}")
    arr = check_bits(bits, k)
    n = arr.size // k
    a = np.zeros((m, n))
    a[:k] = arr.reshape(k, n)
    return a


def round_to_bits(values: np.ndarray) -> np.ndarray:
    """Round to the nearest of {0, 1}; ties at exactly 0.5 go to 1."""
    return (np.asarray(values) >= 0.5).astype(np.int64)


def attack(bits, m: int, k: int, mechanism, seed, label: str | None = None) -> AttackReport:
    """Encode, release through `mechanism`, round the first k rows, compare.

    noise_sigma_effective is the sample standard deviation of the residual
    between the mechanism's output and the planted matrix, a label-free
    diagnostic of how much noise the mechanism actually applied.
    """
    arr = check_bits(bits, k)
    a = encode_database(arr, m, k)
    out = as_matrix(mechanism(a, seed), "mechanism output")
    if out.shape != a.shape:
        raise ValueError(
            f"mechanism must preserve shape, got {out.shape} for input {a.shape}"
        )
    recovered = round_to_bits(out[:k].ravel())
    hamming = int(np.sum(recovered != arr.astype(np.int64)))
    n_prime = arr.size
    residual = out - a
    sigma_eff = float(np.std(residual, ddof=1)) if residual.size > 1 else 0.0
    if label is None:
        label = getattr(mechanism, "label", None) or getattr(
            mechanism, "__name__", "mechanism"
        )
    return AttackReport(
        mechanism_label=str(label),
        recovered_fraction=1.0 - hamming / n_prime,
        hamming_distance=hamming,
        noise_sigma_effective=sigma_eff,
    )


def identity_mechanism(a, seed):
    """Perfectly accurate, perfectly non-private."""
    return np.asarray(a, dtype=np.float64).copy()


identity_mechanism.label = "identity"


def make_rr_mechanism(budget: PrivacyBudget):
    def mechanism(a, seed):
        return randomized_response(a, budget, seed)

    mechanism.label = "rr"
    return mechanism


def make_gaussian_noise_mechanism(sigma: float):
    """Additive i.i.d. Gaussian noise at a fixed scale (no calibration)."""
    sigma = float(sigma)
    if sigma < 0:
        raise ValueError(f"sigma must be non-negative, got {sigma}")

    def mechanism(a, seed):
        a = np.asarray(a, dtype=np.float64)
        if sigma == 0.0:
            return a.copy()
        m, n = a.shape
        return a + gaussian_matrix(m, n, 0.0, sigma, seed)

    mechanism.label = f"gaussian:{sigma:g}"
    return mechanism


def make_constant_mechanism(value: float = 0.5):
    def mechanism(a, seed):
        return np.full_like(np.asarray(a, dtype=np.float64), float(value))

    mechanism.label = f"constant:{value:g}"
    return mechanism


def make_pfp_mechanism(rank: int, oversample: int | None, budget: PrivacyBudget,
                       mode: str = "mu0_coherent", alpha: float | None = None):
    def mechanism(a, seed):
        params = SketchParams(rank, oversample, seed)
        return pfp(a, params, budget, mode, alpha).b

    mechanism.label = "pfp"
    return mechanism
