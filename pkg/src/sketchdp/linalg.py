"""Dense linear algebra substrate.

Matrices are plain float64 numpy arrays in row-major order, validated at
the public boundaries by `as_matrix`. The SVD oracle is a one-sided Jacobi
routine intended for evaluation at desk scale (smaller dimension at most
1024); it is deliberately independent of LAPACK so tests can cross-check
the two.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .rng import STREAM_POWER_START, gaussian_vector

SVD_SIZE_LIMIT = 1024

# Column-drop tolerance for Gram-Schmidt, relative to the initial column norm.
GS_DROP_TOL = 1e-12

# One-sided Jacobi: stop once the swept off-diagonal mass of the implicit
# Gram matrix falls below this fraction of ||M||_F^2, or after 60 sweeps.
JACOBI_OFF_TOL = 1e-14
JACOBI_MAX_SWEEPS = 60

# Singular values at or below this multiple of sigma_1 are treated as exact
# zeros; their left directions are replaced by an orthonormal completion.
SVD_ZERO_REL = 1e-13


def as_matrix(a, name: str = "matrix") -> np.ndarray:
    """Validate `a` as a finite 2-d float64 array and return it C-contiguous."""
    arr = np.asarray(a, dtype=np.float64)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be 2-dimensional, got ndim={arr.ndim}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValueError(f"{name} must have positive shape, got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite entries")
    return np.ascontiguousarray(arr)


def frobenius_norm(a) -> float:
    a = as_matrix(a)
    return float(np.sqrt(np.sum(a * a)))


def spectral_norm(a, iters: int = 200, seed=0) -> float:
    """Power-iteration estimate of the largest singular value.

    With `iters` >= 200 this agrees with the SVD oracle's sigma_1 to about
    1e-6 relative accuracy on desk-scale matrices with a spectral gap. The
    zero matrix returns 0.
    """
    a = as_matrix(a)
    iters = int(iters)
    if iters < 1:
        raise ValueError(f"iters must be >= 1, got {iters}")
    n = a.shape[1]
    v = gaussian_vector(n, 0.0, 1.0, seed, STREAM_POWER_START)
    nv = np.linalg.norm(v)
    if nv == 0.0:
        v = np.zeros(n)
        v[0] = 1.0
    else:
        v = v / nv
    for _ in range(iters):
        u = a.T @ (a @ v)
        nu = np.linalg.norm(u)
        if nu == 0.0:
            return 0.0
        v = u / nu
    return float(np.linalg.norm(a @ v))


def gram_schmidt(y) -> np.ndarray:
    """Orthonormalize the columns of y by modified Gram-Schmidt.

    Each column is projected against the kept basis twice (a single
    re-orthogonalization pass), and columns whose residual drops below
    GS_DROP_TOL times their initial norm are omitted, so the output may
    have fewer columns than the input. Requires rows >= cols.
    """
    y = as_matrix(y)
    m, k = y.shape
    if m < k:
        raise ValueError(f"need rows >= cols to orthonormalize, got {m}x{k}")
    kept: list[np.ndarray] = []
    for j in range(k):
        v = y[:, j].copy()
        norm0 = float(np.linalg.norm(v))
        if norm0 == 0.0:
            continue
        for _ in range(2):
            for q in kept:
                v -= (q @ v) * q
        nv = float(np.linalg.norm(v))
        if nv <= GS_DROP_TOL * norm0:
            continue
        kept.append(v / nv)
    if not kept:
        return np.empty((m, 0))
    return np.ascontiguousarray(np.column_stack(kept))


def project_onto_range(w, a) -> np.ndarray:
    """Project the columns of `a` onto the column span of orthonormal `w`.

    Computed as w (w^T a). Rejects w whose columns are not orthonormal to
    within 1e-8 in max absolute deviation of w^T w from the identity. An
    empty basis (zero columns) projects everything to the zero matrix.
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
    gram = w.T @ w
    dev = float(np.max(np.abs(gram - np.eye(k))))
    if dev > 1e-8:
        raise ValueError(f"w does not have orthonormal columns (deviation {dev:.3e})")
    return w @ (w.T @ a)


@dataclass(frozen=True)
class SvdResult:
    """Economy SVD: u is m x r, vt is r x n, r = min(m, n).

    Singular values are sorted non-increasing; exact zeros get orthonormal
    filler directions in u so that u^T u stays the identity.
    """

    u: np.ndarray
    singular_values: np.ndarray
    vt: np.ndarray


@njit(cache=True, fastmath=True)
def _jacobi_sweeps(M, J, off_tol, max_sweeps):  # pragma: no cover - jitted
    rows, cols = M.shape
    col2 = np.empty(cols)
    sweeps = 0
    for _ in range(max_sweeps):
        sweeps += 1
        # refresh cached column norms; the in-sweep updates drift slightly
        nonzero = 0
        for j in range(cols):
            acc = 0.0
            for i in range(rows):
                acc += M[i, j] * M[i, j]
            col2[j] = acc
            if acc > 0.0:
                nonzero += 1
        if nonzero == 0:
            return 0
        # off-diagonal mass is measured relative to the column norms so a
        # near-parallel pair of tiny columns still counts as unconverged
        off = 0.0
        rotated = 0
        for p in range(cols - 1):
            for q in range(p + 1, cols):
                apq = 0.0
                for i in range(rows):
                    apq += M[i, p] * M[i, q]
                app = col2[p]
                aqq = col2[q]
                if apq == 0.0 or app == 0.0 or aqq == 0.0:
                    continue
                # scale-free cosine avoids under/overflow for graded columns
                denom = np.sqrt(app) * np.sqrt(aqq)
                if denom == 0.0:
                    continue
                rel = apq / denom
                rel2 = rel * rel
                off += rel2
                # orthogonal to working precision already
                if rel2 <= 1e-32:
                    continue
                rotated += 1
                tau = (aqq - app) / (2.0 * apq)
                if tau > 1e150:
                    t = 0.5 / tau
                elif tau < -1e150:
                    t = 0.5 / tau
                elif tau >= 0.0:
                    t = 1.0 / (tau + np.sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = c * t
                for i in range(rows):
                    xp = M[i, p]
                    xq = M[i, q]
                    M[i, p] = c * xp - s * xq
                    M[i, q] = s * xp + c * xq
                for i in range(cols):
                    xp = J[i, p]
                    xq = J[i, q]
                    J[i, p] = c * xp - s * xq
                    J[i, q] = s * xp + c * xq
                # cancellation can push the cached norms slightly negative
                new_p = app - t * apq
                new_q = aqq + t * apq
                col2[p] = new_p if new_p > 0.0 else 0.0
                col2[q] = new_q if new_q > 0.0 else 0.0
        if rotated == 0 or np.sqrt(off) <= off_tol:
            break
    return sweeps


def _complete_basis(columns: np.ndarray, want: int) -> np.ndarray:
    """Append standard-basis directions until `columns` has `want` columns."""
    m = columns.shape[0]
    out = [columns[:, j] for j in range(columns.shape[1])]
    e = 0
    while len(out) < want:
        if e >= m:
            raise RuntimeError("cannot complete orthonormal basis")
        v = np.zeros(m)
        v[e] = 1.0
        e += 1
        for _ in range(2):
            for q in out:
                v -= (q @ v) * q
        nv = float(np.linalg.norm(v))
        if nv > 0.5:
            out.append(v / nv)
    return np.column_stack(out)


def svd_oracle(a) -> SvdResult:
    """One-sided Jacobi SVD for evaluation at desk scale.

    Rotates column pairs of the (possibly transposed) input until the
    off-diagonal mass of the implicit Gram matrix is below JACOBI_OFF_TOL,
    capped at JACOBI_MAX_SWEEPS sweeps. Rejects matrices whose smaller
    dimension exceeds SVD_SIZE_LIMIT.
    """
    a = as_matrix(a)
    m, n = a.shape
    if min(m, n) > SVD_SIZE_LIMIT:
        raise ValueError(
            f"svd_oracle is limited to min(m, n) <= {SVD_SIZE_LIMIT}, got {m}x{n}"
        )
    transposed = m < n
    x = a.T if transposed else a
    # prescale into [-1, 1] so squared column norms neither overflow nor
    # underflow during the sweeps; singular values are rescaled afterwards
    scale = float(np.max(np.abs(x)))
    work = np.array(x, dtype=np.float64, order="F", copy=True)
    if scale > 0.0:
        work /= scale
    rot = np.array(np.eye(x.shape[1]), order="F")
    _jacobi_sweeps(work, rot, JACOBI_OFF_TOL, JACOBI_MAX_SWEEPS)

    scaled_norms = np.sqrt(np.sum(work * work, axis=0))
    order = np.argsort(-scaled_norms, kind="stable")
    sigma = scaled_norms[order] * scale
    floor = sigma[0] * SVD_ZERO_REL if sigma.size else 0.0

    r = x.shape[1]
    left = np.zeros((x.shape[0], r))
    nonzero = 0
    for idx, j in enumerate(order):
        if sigma[idx] > floor and sigma[idx] > 0.0:
            left[:, idx] = work[:, j] / scaled_norms[j]
            nonzero = idx + 1
        else:
            sigma[idx] = 0.0
    if nonzero < r:
        left = _complete_basis(left[:, :nonzero], r)
    right = rot[:, order]

    if transposed:
        u = np.ascontiguousarray(right)
        vt = np.ascontiguousarray(left.T)
    else:
        u = np.ascontiguousarray(left)
        vt = np.ascontiguousarray(right.T)
    return SvdResult(u=u, singular_values=sigma, vt=vt)


def optimal_rank_k_error(a, k: int) -> float:
    """Frobenius distance from `a` to its best rank-k approximation.

    Equals sqrt(sum of squared singular values beyond the k-th), by
    Eckart-Young.
    """
    a = as_matrix(a)
    k = int(k)
    if k < 0 or k > min(a.shape):
        raise ValueError(f"k must lie in [0, min(m, n)], got {k} for {a.shape}")
    res = svd_oracle(a)
    tail = res.singular_values[k:]
    return float(np.sqrt(np.sum(tail * tail)))


def truncate_to_rank(res: SvdResult, k: int) -> np.ndarray:
    """Best rank-k reconstruction from a precomputed SVD."""
    k = int(k)
    u = res.u[:, :k]
    s = res.singular_values[:k]
    vt = res.vt[:k]
    return (u * s) @ vt


def matrix_rank(a, rel_tol: float = 1e-8) -> int:
    """Number of singular values above rel_tol times sigma_1."""
    res = svd_oracle(a)
    s = res.singular_values
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.sum(s > rel_tol * s[0]))
