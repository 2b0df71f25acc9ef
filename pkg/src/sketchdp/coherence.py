"""Coherence measures, basis-entry pruning, and the empirical checks that
relate them to sketched range finding.

Two notions are implemented. The row-norm measure compares the largest row
of a matrix to the typical row norm and lives in [1, sqrt(m)]. The
subspace measure looks at the rows of the left singular factor and lives
in [1, m]; small values mean no standard basis vector aligns with the top
singular subspace.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .linalg import as_matrix, frobenius_norm, gram_schmidt, svd_oracle
from .rng import STREAM_RANGE_NOISE, STREAM_SKETCH, gaussian_matrix

# Default threshold under which singular values do not count toward the
# rank used by the subspace coherence; floating point has no exact rank.
RANK_TOLERANCE = 1e-9

# Constant standing in for the unspecified log-term factor of the basis
# infinity-norm bound; used only when reporting the empirical check.
LINF_LOG_CONSTANT = 8.0

# Guessed constant for the "m is large enough" side condition reported by
# linf_basis_bound_check (never enforced).
SIZE_CONDITION_CONSTANT = 40.0


@dataclass(frozen=True)
class CoherenceReport:
    c_coherence: float
    mu0_coherence: float
    rank_used: int
    max_row_norm: float
    frobenius_norm: float


def c_coherence(a) -> float:
    """Smallest C such that every row norm is at most C ||A||_F / sqrt(m)."""
    a = as_matrix(a)
    fro = frobenius_norm(a)
    if fro == 0.0:
        raise ValueError("coherence is undefined for the all-zero matrix")
    m = a.shape[0]
    max_row = float(np.sqrt(np.max(np.sum(a * a, axis=1))))
    return max_row * math.sqrt(m) / fro


def _mu0_from_left_factor(u: np.ndarray, m: int) -> float:
    r = u.shape[1]
    return m / r * float(np.max(np.sum(u * u, axis=1)))


def mu0_from_svd(res, m: int, rank_tolerance: float = RANK_TOLERANCE) -> tuple[float, int]:
    """Subspace coherence and detected rank from a precomputed SVD."""
    if rank_tolerance <= 0:
        raise ValueError(f"rank_tolerance must be positive, got {rank_tolerance}")
    s = res.singular_values
    if s.size == 0 or s[0] == 0.0:
        raise ValueError("coherence is undefined for the all-zero matrix")
    r = int(np.sum(s > rank_tolerance * s[0]))
    u = res.u[:, :r]
    return _mu0_from_left_factor(u, m), r


def mu0_coherence(a, rank_tolerance: float = RANK_TOLERANCE) -> tuple[float, int]:
    """Subspace coherence of `a`: (m / r) times the largest squared row norm
    of the left singular factor, truncated to singular values above
    rank_tolerance * sigma_1. Returns (mu0, rank_used)."""
    a = as_matrix(a)
    return mu0_from_svd(svd_oracle(a), a.shape[0], rank_tolerance)


def coherence_report(a, rank_tolerance: float = RANK_TOLERANCE) -> CoherenceReport:
    a = as_matrix(a)
    fro = frobenius_norm(a)
    if fro == 0.0:
        raise ValueError("coherence is undefined for the all-zero matrix")
    mu0, rank_used = mu0_from_svd(svd_oracle(a), a.shape[0], rank_tolerance)
    max_row = float(np.sqrt(np.max(np.sum(a * a, axis=1))))
    return CoherenceReport(
        c_coherence=max_row * math.sqrt(a.shape[0]) / fro,
        mu0_coherence=mu0,
        rank_used=rank_used,
        max_row_norm=max_row,
        frobenius_norm=fro,
    )


def prune_entries(w, alpha: float) -> np.ndarray:
    """Zero every entry whose magnitude strictly exceeds alpha.

    Ties at exactly alpha are kept. For unit-norm columns at most
    floor(1 / alpha^2) entries can be zeroed per column.
    """
    w = as_matrix(w, "w")
    alpha = float(alpha)
    if alpha <= 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    out = w.copy()
    out[np.abs(out) > alpha] = 0.0
    return out


class TruncationCheck(NamedTuple):
    lhs: float
    rhs: float
    holds: bool


def truncation_error_check(a, w, alpha: float) -> TruncationCheck:
    """Measure the pruning error against its coherence bound.

    lhs is || W W_a^T A - W W^T A ||_F for W_a = prune_entries(W, alpha);
    rhs is C k ||A||_F / (alpha sqrt(m)). `holds` allows 1e-8 slack.
    """
    a = as_matrix(a, "a")
    w = as_matrix(w, "w")
    if w.shape[0] != a.shape[0]:
        raise ValueError("w and a must have the same number of rows")
    wa = prune_entries(w, alpha)
    lhs = frobenius_norm(w @ (wa.T @ a) - w @ (w.T @ a))
    k = w.shape[1]
    m = a.shape[0]
    rhs = c_coherence(a) * k * frobenius_norm(a) / (float(alpha) * math.sqrt(m))
    return TruncationCheck(lhs=lhs, rhs=rhs, holds=bool(lhs <= rhs + 1e-8))


class LinfBoundCheck(NamedTuple):
    observed_linf: float
    bound: float
    size_condition_met: bool


def linf_basis_bound_check(a, k: int, sigma: float, seed) -> LinfBoundCheck:
    """Empirically check the infinity-norm bound on a noisy sketched basis.

    Forms Y = A Omega + N with Omega an n x k standard Gaussian and N an
    m x k Gaussian of scale sigma, orthonormalizes, and reports the largest
    entry magnitude of the basis against
    sqrt(4 r mu0 / m) + LINF_LOG_CONSTANT * sqrt(k ln m / m).
    The third field reports whether m >= 40 k (r + k) log(r + k) held (the
    lemma's unspecified size condition); it is never enforced.
    """
    a = as_matrix(a)
    m, n = a.shape
    k = int(k)
    sigma = float(sigma)
    if k < 1 or m < k:
        raise ValueError(f"need 1 <= k <= m, got k={k}, m={m}")
    if sigma < 0:
        raise ValueError(f"sigma must be non-negative, got {sigma}")
    mu0, r = mu0_coherence(a)
    if k > r:
        raise ValueError(f"need k <= rank, got k={k}, rank={r}")
    omega = gaussian_matrix(n, k, 0.0, 1.0, seed, STREAM_SKETCH)
    y = a @ omega
    if sigma > 0.0:
        y = y + gaussian_matrix(m, k, 0.0, sigma, seed, STREAM_RANGE_NOISE)
    w = gram_schmidt(y)
    observed = float(np.max(np.abs(w))) if w.size else 0.0
    bound = math.sqrt(4.0 * r * mu0 / m) + LINF_LOG_CONSTANT * math.sqrt(
        k * math.log(m) / m
    )
    size_ok = m >= SIZE_CONDITION_CONSTANT * k * (r + k) * math.log(r + k)
    return LinfBoundCheck(observed_linf=observed, bound=bound, size_condition_met=bool(size_ok))
