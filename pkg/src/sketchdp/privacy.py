"""Privacy primitives: budgets, calibrated Gaussian noise, composition
accounting, and the input-perturbation (randomized response) baseline.

All noise formulas use the natural logarithm. The privacy guarantee is
carried entirely by noise calibration; no statistical auditing of the
guarantee itself is attempted here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .linalg import as_matrix
from .rng import STREAM_RESPONSE_NOISE, gaussian_matrix


@dataclass(frozen=True)
class PrivacyBudget:
    """An (epsilon, delta) pair with epsilon in (0, 1] and delta in (0, 1).

    Epsilons above 1 fall outside the hypothesis of the advanced
    composition bound and are rejected rather than silently accepted;
    epsilon = 1 itself is the conventional operating point and is allowed.
    """

    epsilon: float
    delta: float

    def __post_init__(self):
        eps = float(self.epsilon)
        dlt = float(self.delta)
        object.__setattr__(self, "epsilon", eps)
        object.__setattr__(self, "delta", dlt)
        if not (0.0 < eps <= 1.0) or not math.isfinite(eps):
            raise ValueError(f"epsilon must lie in (0, 1], got {eps}")
        if not (0.0 < dlt < 1.0) or not math.isfinite(dlt):
            raise ValueError(f"delta must lie in (0, 1), got {dlt}")

    def halved(self) -> "PrivacyBudget":
        """Budget for one of two equal stages composing to this one."""
        return PrivacyBudget(self.epsilon / 2.0, self.delta / 2.0)


@dataclass(frozen=True)
class NoiseCalibration:
    """Per-coordinate Gaussian scale calibrated for a sensitivity and budget."""

    sigma: float
    sensitivity: float
    budget: PrivacyBudget


def gaussian_mechanism_sigma(c: float, budget: PrivacyBudget) -> float:
    """Per-coordinate noise scale c / epsilon * sqrt(ln(1.25 / delta))."""
    c = float(c)
    if c <= 0 or not math.isfinite(c):
        raise ValueError(f"sensitivity must be positive, got {c}")
    return c / budget.epsilon * math.sqrt(math.log(1.25 / budget.delta))


def gaussian_calibration(c: float, budget: PrivacyBudget) -> NoiseCalibration:
    return NoiseCalibration(
        sigma=gaussian_mechanism_sigma(c, budget), sensitivity=float(c), budget=budget
    )


def advanced_composition(
    k: int, per_step: PrivacyBudget, delta_prime: float | None = None
) -> tuple[float, float]:
    """Budget consumed by k releases at `per_step` each.

    With delta_prime=None this is plain summation: (k eps, k delta).
    Otherwise returns
    (sqrt(2 k ln(1/delta')) eps + 2 k eps^2, k delta + delta').
    """
    k = int(k)
    if k < 1:
        raise ValueError(f"k must be at least 1, got {k}")
    eps = per_step.epsilon
    dlt = per_step.delta
    if delta_prime is None:
        return (k * eps, k * dlt)
    delta_prime = float(delta_prime)
    if delta_prime <= 0:
        raise ValueError(f"delta_prime must be positive, got {delta_prime}")
    eps_prime = math.sqrt(2.0 * k * math.log(1.0 / delta_prime)) * eps + 2.0 * k * eps * eps
    return (eps_prime, k * dlt + delta_prime)


def randomized_response(
    a, budget: PrivacyBudget, seed, *, noise_scale_override: float | None = None
) -> np.ndarray:
    """Perturb every entry with i.i.d. Gaussian noise calibrated at
    sensitivity 1 (a unit row change is a unit change of the flattened
    matrix).

    `noise_scale_override` is test instrumentation only: it replaces the
    calibrated scale (0 disables noise entirely) and is never reachable
    from the command-line interface.
    """
    a = as_matrix(a)
    if noise_scale_override is None:
        sigma = gaussian_mechanism_sigma(1.0, budget)
    else:
        sigma = float(noise_scale_override)
        if sigma < 0:
            raise ValueError("noise_scale_override must be non-negative")
    if sigma == 0.0:
        return a.copy()
    m, n = a.shape
    return a + gaussian_matrix(m, n, 0.0, sigma, seed, STREAM_RESPONSE_NOISE)
