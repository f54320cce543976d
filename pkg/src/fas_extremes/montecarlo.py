"""Seeded Monte Carlo oracle for the correlated-aperture outage model.

Port gains are drawn as g = L z with L the (jittered) Cholesky factor of
the correlation matrix and z a standard complex normal vector; real and
imaginary parts are N(0, 1/2) each so every |g_n|^2 is exactly unit-mean
exponential. Streams are keyed by (seed, worker) through the Philox
counter-based generator: worker w owns a fixed slice of the trial
budget and draws from Philox(seed).jumped(w), so any (seed, workers,
trials) triple reproduces bit-for-bit. Workers run serially in-process;
the knob exists for stream partitioning and metadata, not OS threads,
which keeps the reduction order deterministic at no accuracy cost.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fieldmodel import (
    ApertureConfig,
    CholeskyFactor,
    CorrMatrix,
    KlSpec,
    cholesky,
    correlation_matrix,
)
from .specialfn import DomainError

__all__ = [
    "McConfig",
    "OutageEstimate",
    "simulate_outage",
    "simulate_outage_truncated",
    "simulate_ergodic_rate",
    "count_upcrossings",
]

_CHUNK_BUDGET = 4_000_000  # floats per chunk row-block, keeps peak memory modest


@dataclass(frozen=True)
class McConfig:
    trials: int
    seed: int = 42
    workers: int = 1

    def __post_init__(self):
        if int(self.trials) != self.trials or self.trials < 1:
            raise DomainError(f"trials must be a positive integer, got {self.trials!r}")
        if int(self.workers) != self.workers or self.workers < 1:
            raise DomainError(f"workers must be a positive integer, got {self.workers!r}")
        if int(self.seed) != self.seed or not (0 <= self.seed < 2 ** 64):
            raise DomainError("seed must be a 64-bit unsigned integer")
        object.__setattr__(self, "trials", int(self.trials))
        object.__setattr__(self, "workers", int(self.workers))
        object.__setattr__(self, "seed", int(self.seed))


@dataclass(frozen=True)
class OutageEstimate:
    """Uniform result record shared by the analytic and MC routes."""

    p: float
    method: str
    trials: int | None = None
    std_err: float | None = None
    clamped: bool = False
    valid: bool = True
    jitter: float | None = None


def _worker_slices(trials: int, workers: int) -> list[int]:
    base, extra = divmod(trials, workers)
    return [base + (1 if w < extra else 0) for w in range(workers)]


def _worker_rng(cfg: McConfig, worker: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=cfg.seed).jumped(worker))


def _chunk_rows(ncols: int) -> int:
    return max(1024, min(262_144, _CHUNK_BUDGET // max(1, ncols)))


def _gain_chunks(mat: np.ndarray, n_rows: int, rng: np.random.Generator):
    """Yield blocks of squared port gains, rows are trials.

    mat maps the latent standard-normal coordinates to port amplitudes
    (Cholesky factor for the full model, U_K sqrt(L_K) for truncated).
    Two real matmuls beat one complex one and keep the arithmetic
    bit-stable across platforms with the same BLAS.
    """
    ncols = mat.shape[1]
    step = _chunk_rows(max(ncols, mat.shape[0]))
    done = 0
    root_half = math.sqrt(0.5)
    while done < n_rows:
        m = min(step, n_rows - done)
        zr = rng.standard_normal((m, ncols)) * root_half
        zi = rng.standard_normal((m, ncols)) * root_half
        gr = zr @ mat.T
        gi = zi @ mat.T
        yield gr * gr + gi * gi
        done += m


def _resolve_factor(R: CorrMatrix | CholeskyFactor | np.ndarray) -> CholeskyFactor:
    if isinstance(R, CholeskyFactor):
        return R
    return cholesky(R)


def simulate_outage(
    R: CorrMatrix | CholeskyFactor | np.ndarray, x: float, cfg: McConfig
) -> OutageEstimate:
    """Fraction of trials where every port gain stays below x."""
    x = float(x)
    if not (x > 0):
        raise DomainError(f"threshold x must be positive, got {x!r}")
    factor = _resolve_factor(R)
    hits = 0
    for w, n_w in enumerate(_worker_slices(cfg.trials, cfg.workers)):
        if n_w == 0:
            continue
        rng = _worker_rng(cfg, w)
        for gains in _gain_chunks(factor.lower, n_w, rng):
            hits += int((gains.max(axis=1) < x).sum())
    p = hits / cfg.trials
    return OutageEstimate(
        p=p,
        method="mc",
        trials=cfg.trials,
        std_err=math.sqrt(p * (1.0 - p) / cfg.trials),
        jitter=factor.jitter,
    )


def simulate_outage_truncated(kl: KlSpec, x: float, cfg: McConfig) -> OutageEstimate:
    """Outage of the rank-K truncated field, exact re-parameterization at K = N."""
    x = float(x)
    if not (x > 0):
        raise DomainError(f"threshold x must be positive, got {x!r}")
    mat = kl.eigenvectors * np.sqrt(np.maximum(kl.eigenvalues, 0.0))
    hits = 0
    for w, n_w in enumerate(_worker_slices(cfg.trials, cfg.workers)):
        if n_w == 0:
            continue
        rng = _worker_rng(cfg, w)
        for gains in _gain_chunks(mat, n_w, rng):
            hits += int((gains.max(axis=1) < x).sum())
    p = hits / cfg.trials
    return OutageEstimate(
        p=p,
        method="mc_truncated",
        trials=cfg.trials,
        std_err=math.sqrt(p * (1.0 - p) / cfg.trials),
    )


def simulate_ergodic_rate(
    R: CorrMatrix | np.ndarray, avg_snr: float, cfg: McConfig
) -> tuple[float, float]:
    """Sample mean and standard error of log2(1 + snr * max_n |g_n|^2)."""
    avg_snr = float(avg_snr)
    if not (avg_snr > 0):
        raise DomainError(f"avg_snr must be positive, got {avg_snr!r}")
    factor = _resolve_factor(R)
    total = 0.0
    total_sq = 0.0
    for w, n_w in enumerate(_worker_slices(cfg.trials, cfg.workers)):
        if n_w == 0:
            continue
        rng = _worker_rng(cfg, w)
        for gains in _gain_chunks(factor.lower, n_w, rng):
            rate = np.log2(1.0 + avg_snr * gains.max(axis=1))
            total += float(rate.sum())
            total_sq += float((rate * rate).sum())
    n = cfg.trials
    mean = total / n
    var = max(0.0, total_sq / n - mean * mean)
    return mean, math.sqrt(var / n)


def count_upcrossings(
    config: ApertureConfig, u: float, cfg: McConfig
) -> tuple[float, float]:
    """Mean count of grid upcrossings of level u by the squared field.

    An upcrossing is chi[n] < u <= chi[n+1] on the discrete port grid;
    no sub-grid interpolation is attempted, so the count is biased low
    by O(1/N). Use N >= 100 W to keep that under a few percent.
    """
    u = float(u)
    if not (u > 0):
        raise DomainError(f"level u must be positive, got {u!r}")
    if config.N < 2:
        raise DomainError("upcrossing counting needs at least two ports")
    factor = cholesky(correlation_matrix(config))
    total = 0.0
    total_sq = 0.0
    for w, n_w in enumerate(_worker_slices(cfg.trials, cfg.workers)):
        if n_w == 0:
            continue
        rng = _worker_rng(cfg, w)
        for gains in _gain_chunks(factor.lower, n_w, rng):
            cross = ((gains[:, :-1] < u) & (gains[:, 1:] >= u)).sum(axis=1)
            cross = cross.astype(float)
            total += float(cross.sum())
            total_sq += float((cross * cross).sum())
    n = cfg.trials
    mean = total / n
    var = max(0.0, total_sq / n - mean * mean)
    return mean, math.sqrt(var / n)
