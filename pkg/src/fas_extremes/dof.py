"""Effective degrees-of-freedom metrics for the correlated aperture.

Three views of "how many independent looks does the aperture give":
the participation ratio of the eigenvalue spectrum, closed-form
large-aperture asymptotics, and a cumulative-energy truncation rule.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fieldmodel import CorrMatrix, EigenSpectrum
from .kernels import CorrelationModel
from .specialfn import DomainError

__all__ = [
    "DofReport",
    "participation_ratio",
    "keff_asymptotic",
    "energy_threshold_K",
]


@dataclass(frozen=True)
class DofReport:
    participation_ratio: float
    asymptotic_keff: float
    energy_threshold_k: int
    epsilon0: float


def participation_ratio(R: CorrMatrix | np.ndarray) -> float:
    """N^2 / tr(R^2) for a unit-diagonal correlation matrix.

    Equals (sum lambda)^2 / sum lambda^2, computed straight from the
    entries since tr(R^2) = sum of squared entries for symmetric R.
    Lies in [1, N]: 1 for full correlation, N for identity.
    """
    m = R.entries if isinstance(R, CorrMatrix) else np.asarray(R, dtype=float)
    n = m.shape[0]
    if not np.allclose(np.diag(m), 1.0, atol=1e-9):
        raise DomainError("participation ratio expects a unit-diagonal matrix")
    return float(n * n / (m * m).sum())


def keff_asymptotic(model: CorrelationModel, W: float, ceil_variant: bool = False) -> float:
    """Large-N effective mode count for an aperture of W wavelengths.

    Gaussian kernel: pi*sqrt(2)*W. Bessel kernel: 2W + 1, or the integer
    variant 2*ceil(W) + 1 when ceil_variant is set.
    """
    W = float(W)
    if not (W > 0) or not math.isfinite(W):
        raise DomainError(f"aperture W must be positive, got {W!r}")
    if model is CorrelationModel.GAUSSIAN:
        return math.pi * math.sqrt(2.0) * W
    if ceil_variant:
        return 2.0 * math.ceil(W) + 1.0
    return 2.0 * W + 1.0


def energy_threshold_K(spec: EigenSpectrum, epsilon0: float) -> int:
    """Smallest K whose leading eigenvalues capture (1 - epsilon0) of the trace."""
    epsilon0 = float(epsilon0)
    if not (0.0 < epsilon0 < 1.0):
        raise DomainError(f"epsilon0 must lie in (0, 1), got {epsilon0!r}")
    n = spec.dim
    target = (1.0 - epsilon0) * n
    running = np.cumsum(spec.eigenvalues)
    meets = np.nonzero(running >= target)[0]
    # eigenvalue roundoff can leave the final cumsum a hair under N
    return int(meets[0]) + 1 if len(meets) else n
