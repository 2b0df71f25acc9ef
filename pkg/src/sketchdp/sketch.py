"""Sketch-then-project low-rank approximation.

Three routes to a rank <= k approximation of an m x n matrix:

* `hmt_low_rank` - the non-private baseline: Gaussian sketch, orthonormal
  range basis, projection. No noise anywhere.
* `rr_low_rank_baseline` - input perturbation followed by exact truncation
  of the noisy matrix.
* `pfp` (private find-and-project) - a noisy range finder, optional entry
  pruning of the basis, and a noisy projection, each on half the privacy
  budget so the two stages compose to the full budget.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .coherence import c_coherence, prune_entries
from .linalg import as_matrix, frobenius_norm, gram_schmidt, svd_oracle, truncate_to_rank
from .privacy import PrivacyBudget, gaussian_mechanism_sigma, randomized_response
from .rng import (
    STREAM_PROJECTION_NOISE,
    STREAM_RANGE_NOISE,
    STREAM_SKETCH,
    check_seed,
    gaussian_matrix,
)

logger = logging.getLogger("sketchdp")

MIN_ALPHA = 1e-6


@dataclass(frozen=True)
class SketchParams:
    """Target rank, oversampling, and the seed driving all randomness.

    The sketch width is k = target_rank + oversampling. Oversampling
    defaults to target_rank + 1, the setting under which the baseline's
    expected error is within sqrt(2) of optimal.
    """

    target_rank: int
    oversampling: int | None = None
    seed: int = 0

    def __post_init__(self):
        r = int(self.target_rank)
        p = r + 1 if self.oversampling is None else int(self.oversampling)
        object.__setattr__(self, "target_rank", r)
        object.__setattr__(self, "oversampling", p)
        object.__setattr__(self, "seed", check_seed(self.seed))
        if r < 2:
            raise ValueError(f"target_rank must be at least 2, got {r}")
        if p < 2:
            raise ValueError(f"oversampling must be at least 2, got {p}")

    @property
    def k(self) -> int:
        return self.target_rank + self.oversampling

    def validate_for_shape(self, m: int, n: int) -> None:
        if self.k > min(m, n):
            raise ValueError(
                f"sketch width k={self.k} exceeds min(m, n)={min(m, n)}"
            )


@dataclass(frozen=True)
class RangeResult:
    """Orthonormal range basis plus the noise scale that produced it.

    k_effective can fall below the requested sketch width when the
    orthonormalization drops dependent columns.
    """

    w: np.ndarray
    rho_range: float
    k_effective: int


@dataclass(frozen=True)
class ApproxResult:
    """A rank <= k approximation with its diagnostics.

    achieved_error is ||A - B||_F recomputed from the inputs. range_error,
    when present, is ||A - W W^T A||_F for the basis that produced B; the
    difference between the two isolates the projection noise. Diagnostics
    are computed from the raw input and are not part of any private
    release.
    """

    b: np.ndarray
    alpha_used: float
    achieved_error: float
    rho_range: float | None = None
    rho_proj: float | None = None
    budget_spent: PrivacyBudget | None = None
    k_effective: int | None = None
    range_error: float | None = None


def range_noise_scale(k: int, budget: PrivacyBudget) -> float:
    """Noise scale of the private range finder: 2/eps sqrt(2k ln(4k/delta))."""
    k = int(k)
    if k < 1:
        raise ValueError(f"k must be positive, got {k}")
    return 2.0 / budget.epsilon * math.sqrt(2.0 * k * math.log(4.0 * k / budget.delta))


def projection_noise_scale(k: int, budget: PrivacyBudget) -> float:
    """Noise scale of the private projection:
    2/eps sqrt(8k ln(4k/delta) ln(2/delta))."""
    k = int(k)
    if k < 1:
        raise ValueError(f"k must be positive, got {k}")
    return (
        2.0
        / budget.epsilon
        * math.sqrt(
            8.0 * k * math.log(4.0 * k / budget.delta) * math.log(2.0 / budget.delta)
        )
    )


def hmt_low_rank(a, params: SketchParams) -> ApproxResult:
    """Non-private sketch-and-project baseline.

    Y = A Omega for a standard Gaussian n x k sketch, B = W W^T A for W an
    orthonormal basis of range(Y).
    """
    a = as_matrix(a)
    m, n = a.shape
    params.validate_for_shape(m, n)
    omega = gaussian_matrix(n, params.k, 0.0, 1.0, params.seed, STREAM_SKETCH)
    w = gram_schmidt(a @ omega)
    b = w @ (w.T @ a) if w.shape[1] else np.zeros_like(a)
    err = frobenius_norm(a - b)
    return ApproxResult(
        b=b,
        alpha_used=1.0,
        achieved_error=err,
        k_effective=w.shape[1],
        range_error=err,
    )


def private_range_finder(
    a,
    params: SketchParams,
    budget: PrivacyBudget,
    *,
    noise_scale_override: float | None = None,
) -> RangeResult:
    """Range finder that perturbs the sketch before orthonormalizing.

    Y = A Omega, then i.i.d. Gaussian noise of scale rho_range(k, budget)
    is added to Y and the sum is orthonormalized. The reported rho_range is
    always the calibrated scale; noise_scale_override (testing only)
    changes the noise actually drawn, with 0 skipping it entirely.
    """
    a = as_matrix(a)
    m, n = a.shape
    params.validate_for_shape(m, n)
    k = params.k
    rho = range_noise_scale(k, budget)
    scale = rho if noise_scale_override is None else float(noise_scale_override)
    if scale < 0:
        raise ValueError("noise_scale_override must be non-negative")
    omega = gaussian_matrix(n, k, 0.0, 1.0, params.seed, STREAM_SKETCH)
    y = a @ omega
    if scale > 0.0:
        y = y + gaussian_matrix(m, k, 0.0, scale, params.seed, STREAM_RANGE_NOISE)
    w = gram_schmidt(y)
    return RangeResult(w=w, rho_range=rho, k_effective=w.shape[1])


def private_projection(
    a,
    w,
    budget: PrivacyBudget,
    seed,
    *,
    noise_scale_override: float | None = None,
) -> np.ndarray:
    """Noisy projection B = W (W^T A + N).

    Row i of N carries scale alpha_i * rho where alpha_i is the largest
    entry magnitude of column i of W and rho = projection_noise_scale.
    Columns of W must have norm at most 1 (+1e-10); pruned bases qualify
    without re-normalization.
    """
    a = as_matrix(a, "a")
    w = np.asarray(w, dtype=np.float64)
    if w.ndim != 2 or w.shape[0] != a.shape[0]:
        raise ValueError(
            f"row counts must agree: w has shape {w.shape}, a has shape {a.shape}"
        )
    k = w.shape[1]
    if k == 0:
        return np.zeros_like(a)
    w = as_matrix(w, "w")
    col_norms = np.sqrt(np.sum(w * w, axis=0))
    worst = float(np.max(col_norms))
    if worst > 1.0 + 1e-10:
        raise ValueError(f"columns of w must have norm <= 1, got {worst!r}")
    rho = projection_noise_scale(k, budget)
    scale = rho if noise_scale_override is None else float(noise_scale_override)
    if scale < 0:
        raise ValueError("noise_scale_override must be non-negative")
    s = w.T @ a
    if scale > 0.0:
        alphas = np.max(np.abs(w), axis=0)
        n = a.shape[1]
        noise = gaussian_matrix(k, n, 0.0, 1.0, seed, STREAM_PROJECTION_NOISE)
        s = s + noise * (alphas[:, None] * scale)
    return w @ s


def select_alpha(
    a_frobenius: float, c: float, k: int, m: int, n: int, budget: PrivacyBudget
) -> float:
    """Pruning threshold balancing truncation error against projection noise.

    Returns sqrt(C ||A||_F eps / (sqrt(m n) ln(4k/delta))) clamped into
    [1e-6, 1]; the unclamped value equalizes the 1/alpha truncation term
    and the alpha-proportional noise term.
    """
    a_frobenius = float(a_frobenius)
    c = float(c)
    k = int(k)
    m = int(m)
    n = int(n)
    if min(a_frobenius, c) <= 0 or min(k, m, n) < 1:
        raise ValueError("select_alpha arguments must be positive")
    value = math.sqrt(
        c
        * a_frobenius
        * budget.epsilon
        / (math.sqrt(float(m) * float(n)) * math.log(4.0 * k / budget.delta))
    )
    return min(1.0, max(MIN_ALPHA, value))


def pfp(
    a,
    params: SketchParams,
    budget: PrivacyBudget,
    mode: str = "mu0_coherent",
    alpha_override: float | None = None,
    *,
    noise_scale_override: float | None = None,
) -> ApproxResult:
    """Private find-and-project pipeline.

    Runs the private range finder on (eps/2, delta/2), prunes the basis at
    a threshold alpha, and runs the private projection on the remaining
    (eps/2, delta/2), so the stages compose to exactly the given budget.

    alpha is alpha_override when supplied; otherwise mode "c_coherent"
    derives it from the data via select_alpha (that auxiliary computation
    reads C and ||A||_F without privatization, and a warning is logged)
    while mode "mu0_coherent" fixes alpha = 1, leaving the basis untouched.
    """
    a = as_matrix(a)
    m, n = a.shape
    if mode not in ("c_coherent", "mu0_coherent"):
        raise ValueError(f"mode must be 'c_coherent' or 'mu0_coherent', got {mode!r}")
    if alpha_override is not None:
        alpha_override = float(alpha_override)
        if not 0.0 < alpha_override <= 1.0:
            raise ValueError(f"alpha_override must lie in (0, 1], got {alpha_override}")
    stage_budget = budget.halved()

    found = private_range_finder(
        a, params, stage_budget, noise_scale_override=noise_scale_override
    )
    w = found.w

    if alpha_override is not None:
        alpha = alpha_override
    elif mode == "c_coherent":
        alpha = select_alpha(
            frobenius_norm(a), c_coherence(a), params.k, m, n, budget
        )
        logger.warning(
            "alpha=auto reads the row-norm coherence and Frobenius norm of the "
            "raw data without privatization; supply --alpha explicitly or use "
            "mu0 mode for end-to-end privacy"
        )
    else:
        alpha = 1.0

    w_pruned = prune_entries(w, alpha) if alpha < 1.0 and w.shape[1] else w
    b = private_projection(
        a,
        w_pruned,
        stage_budget,
        params.seed,
        noise_scale_override=noise_scale_override,
    )
    k_eff = w_pruned.shape[1]
    return ApproxResult(
        b=b,
        alpha_used=alpha,
        achieved_error=frobenius_norm(a - b),
        rho_range=found.rho_range,
        rho_proj=projection_noise_scale(k_eff, stage_budget) if k_eff else None,
        budget_spent=budget,
        k_effective=found.k_effective,
        range_error=frobenius_norm(a - w @ (w.T @ a)) if w.shape[1] else frobenius_norm(a),
    )


def rr_low_rank_baseline(
    a,
    k: int,
    budget: PrivacyBudget,
    seed,
    *,
    noise_scale_override: float | None = None,
) -> ApproxResult:
    """Input perturbation followed by exact rank-k truncation.

    The perturbed matrix is decomposed by the SVD oracle, so the input must
    be within its desk-scale size limit.
    """
    a = as_matrix(a)
    k = int(k)
    if k < 1 or k > min(a.shape):
        raise ValueError(f"k must lie in [1, min(m, n)], got {k} for {a.shape}")
    noisy = randomized_response(
        a, budget, seed, noise_scale_override=noise_scale_override
    )
    res = svd_oracle(noisy)
    b = truncate_to_rank(res, k)
    return ApproxResult(
        b=b,
        alpha_used=1.0,
        achieved_error=frobenius_norm(a - b),
        budget_spent=budget,
        k_effective=min(k, int(np.sum(res.singular_values > 0.0))),
    )
