"""Experiment orchestration: single runs, head-to-head trials, grid sweeps,
and CSV emission.

Trial i of a run always uses seed base_seed + i, so any record can be
reproduced in isolation. Records carry the rank-k error floor and both
coherence measures of the input so downstream analysis never needs the
matrix itself.
"""

from __future__ import annotations

import itertools
import logging
import math
import time
from dataclasses import dataclass
from typing import Iterable, Iterator

import numpy as np

from .coherence import c_coherence, mu0_from_svd
from .generators import GeneratorSpec, generate
from .linalg import as_matrix, svd_oracle
from .privacy import PrivacyBudget
from .sketch import SketchParams, hmt_low_rank, pfp, rr_low_rank_baseline

logger = logging.getLogger("sketchdp")

ALGORITHMS = ("rr", "hmt", "pfp")

RECORD_FIELDS = (
    "algorithm",
    "m",
    "n",
    "k",
    "r",
    "p",
    "epsilon",
    "delta",
    "alpha",
    "trial_seed",
    "error_frobenius",
    "optimal_rank_k_error",
    "c_coherence",
    "mu0_coherence",
    "wall_time_ms",
)

# Guessed constant for the "m large enough" side condition of the basis
# flatness argument; violations are logged, never enforced.
_SIZE_CONDITION_CONSTANT = 40.0


@dataclass(frozen=True)
class ExperimentRecord:
    algorithm: str
    m: int
    n: int
    k: int
    r: int
    p: int
    epsilon: float
    delta: float
    alpha: float
    trial_seed: int
    error_frobenius: float
    optimal_rank_k_error: float
    c_coherence: float
    mu0_coherence: float
    wall_time_ms: int


def _fmt(value) -> str:
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def records_to_csv(
    records: Iterable[ExperimentRecord], include_timings: bool = False
) -> str:
    """Render records as CSV with a fixed header.

    Floats carry 17 significant digits. Unless include_timings is set the
    wall_time_ms column is written as 0 so that re-runs of the same command
    produce byte-identical output.
    """
    lines = [",".join(RECORD_FIELDS)]
    for rec in records:
        values = [getattr(rec, f) for f in RECORD_FIELDS]
        if not include_timings:
            values[-1] = 0
        lines.append(",".join(_fmt(v) for v in values))
    return "\n".join(lines) + "\n"


def run_experiment(
    algorithm: str,
    a,
    *,
    rank: int,
    oversample: int | None = None,
    budget: PrivacyBudget | None = None,
    trials: int = 1,
    base_seed: int = 0,
    mode: str = "mu0_coherent",
    alpha: float | None = None,
) -> list[ExperimentRecord]:
    """Run `trials` independent trials of one algorithm on one matrix.

    Trial i uses seed base_seed + i. The error floor and the coherence
    measurements are computed once (from a single SVD of the input) and
    stamped into every record.
    """
    if algorithm not in ALGORITHMS:
        raise ValueError(f"algorithm must be one of {ALGORITHMS}, got {algorithm!r}")
    a = as_matrix(a)
    trials = int(trials)
    if trials < 1:
        raise ValueError(f"trials must be at least 1, got {trials}")
    if algorithm != "hmt" and budget is None:
        raise ValueError(f"algorithm {algorithm!r} requires a privacy budget")
    m, n = a.shape
    rank = int(rank)
    oversample = rank + 1 if oversample is None else int(oversample)
    k = rank + oversample

    svd = svd_oracle(a)
    tail = svd.singular_values[k:]
    optimal_error = float(np.sqrt(np.sum(tail * tail)))
    c_coh = c_coherence(a)
    mu0, rank_used = mu0_from_svd(svd, m)
    if m < _SIZE_CONDITION_CONSTANT * k * rank_used * math.log(max(rank_used, 2)):
        logger.info(
            "m=%d is small for the basis-flatness regime (rank %d, width %d); "
            "bounds may be loose here",
            m,
            rank_used,
            k,
        )

    eps = budget.epsilon if budget is not None else 0.0
    dlt = budget.delta if budget is not None else 0.0

    records = []
    for i in range(trials):
        seed = base_seed + i
        t0 = time.perf_counter()
        if algorithm == "hmt":
            result = hmt_low_rank(a, SketchParams(rank, oversample, seed))
        elif algorithm == "rr":
            result = rr_low_rank_baseline(a, k, budget, seed)
        else:
            result = pfp(a, SketchParams(rank, oversample, seed), budget, mode, alpha)
        wall_ms = int(round((time.perf_counter() - t0) * 1000.0))
        records.append(
            ExperimentRecord(
                algorithm=algorithm,
                m=m,
                n=n,
                k=k,
                r=rank,
                p=oversample,
                epsilon=eps,
                delta=dlt,
                alpha=result.alpha_used,
                trial_seed=seed,
                error_frobenius=result.achieved_error,
                optimal_rank_k_error=optimal_error,
                c_coherence=c_coh,
                mu0_coherence=mu0,
                wall_time_ms=wall_ms,
            )
        )
    return records


def sweep(
    *,
    m_values: Iterable[int],
    n_values: Iterable[int],
    k_values: Iterable[int],
    epsilon_values: Iterable[float],
    kinds: Iterable[str],
    rank: int,
    delta: float,
    trials: int = 1,
    base_seed: int = 0,
    algorithms: Iterable[str] = ("pfp",),
    mode: str = "mu0_coherent",
    alpha: float | None = None,
) -> Iterator[list[ExperimentRecord]]:
    """Run every grid cell, yielding the records of one cell at a time.

    Cells iterate in the declared order (m, n, k, epsilon, kind); trial
    seeds are globally distinct via base_seed + cell_index * trials + i,
    and each cell generates its matrix from seed base_seed + cell_index.
    Yielding per cell lets the caller flush partial results.
    """
    grid = list(
        itertools.product(
            [int(v) for v in m_values],
            [int(v) for v in n_values],
            [int(v) for v in k_values],
            [float(v) for v in epsilon_values],
            list(kinds),
        )
    )
    if not grid:
        raise ValueError("sweep grid is empty")
    algorithms = list(algorithms)
    for alg in algorithms:
        if alg not in ALGORITHMS:
            raise ValueError(f"algorithm must be one of {ALGORITHMS}, got {alg!r}")
    rank = int(rank)
    for cell_index, (m, n, k, eps, kind) in enumerate(grid):
        oversample = k - rank
        spec = GeneratorSpec(kind=kind, m=m, n=n, rank=rank, seed=base_seed + cell_index)
        a = generate(spec)
        budget = PrivacyBudget(eps, delta)
        cell_records: list[ExperimentRecord] = []
        for alg in algorithms:
            cell_records.extend(
                run_experiment(
                    alg,
                    a,
                    rank=rank,
                    oversample=oversample,
                    budget=None if alg == "hmt" else budget,
                    trials=trials,
                    base_seed=base_seed + cell_index * trials,
                    mode=mode,
                    alpha=alpha,
                )
            )
        yield cell_records
