"""Discrete aperture model: port grid, correlation matrix, eigenstructure.

The antenna aperture [0, W] is sampled at N equally spaced ports. The
port-gain covariance is a symmetric Toeplitz matrix built from one of
the kernels module's correlation functions. Eigendecomposition uses a
cyclic Jacobi solver with a fixed ordering and sign convention so that
downstream fixtures reproduce bit-for-bit; sampling factorizations go
through Cholesky with an escalating diagonal jitter.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .kernels import CorrelationModel, correlation
from .specialfn import DomainError

__all__ = [
    "ApertureConfig",
    "CorrMatrix",
    "EigenSpectrum",
    "KlSpec",
    "CholeskyFactor",
    "FactorizationError",
    "ConvergenceError",
    "port_positions",
    "correlation_matrix",
    "eigendecompose",
    "cholesky",
    "kl_truncate",
    "dump_matrix_csv",
]

JITTER_LADDER = (0.0, 1e-12, 1e-11, 1e-10, 1e-9, 1e-8)


class FactorizationError(ArithmeticError):
    """Matrix stayed non-positive-definite through the whole jitter ladder."""


class ConvergenceError(ArithmeticError):
    """Jacobi sweeps hit the iteration cap; carries the residual."""

    def __init__(self, residual: float, sweeps: int):
        super().__init__(
            f"eigensolver failed to converge: off-diagonal residual "
            f"{residual:.3e} after {sweeps} sweeps"
        )
        self.residual = residual
        self.sweeps = sweeps


@dataclass(frozen=True)
class ApertureConfig:
    """Aperture of W wavelengths sampled at N ports."""

    W: float
    N: int
    model: CorrelationModel

    def __post_init__(self):
        if not (self.W > 0) or not math.isfinite(self.W):
            raise DomainError(f"aperture W must be positive, got {self.W!r}")
        if int(self.N) != self.N or self.N < 1:
            raise DomainError(f"port count N must be an integer >= 1, got {self.N!r}")
        object.__setattr__(self, "N", int(self.N))


@dataclass(frozen=True)
class CorrMatrix:
    dim: int
    entries: np.ndarray
    source: ApertureConfig


@dataclass(frozen=True)
class EigenSpectrum:
    """Descending eigenvalues with matched orthonormal eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def dim(self) -> int:
        return len(self.eigenvalues)


@dataclass(frozen=True)
class KlSpec:
    """Leading K eigenpairs plus the energy fraction they leave behind."""

    rank: int
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    truncation_error: float


@dataclass(frozen=True)
class CholeskyFactor:
    lower: np.ndarray
    jitter: float = 0.0
    # jitter is the diagonal shift that made the factorization succeed;
    # zero for cleanly positive-definite input


def port_positions(config: ApertureConfig) -> np.ndarray:
    """Port coordinates tau_n = (n-1) W / (N-1), ascending from 0 to W."""
    if config.N == 1:
        return np.zeros(1)
    return np.arange(config.N) * (config.W / (config.N - 1))


def correlation_matrix(config: ApertureConfig) -> CorrMatrix:
    """Toeplitz correlation matrix R[m, n] = rho((m-n) W/(N-1)).

    Only N distinct kernel values exist on the uniform grid, so the
    kernel is evaluated once per lag and spread along the diagonals.
    """
    n = config.N
    if n == 1:
        return CorrMatrix(dim=1, entries=np.ones((1, 1)), source=config)
    spacing = config.W / (n - 1)
    lags = np.array([correlation(config.model, k * spacing) for k in range(n)])
    idx = np.abs(np.subtract.outer(np.arange(n), np.arange(n)))
    return CorrMatrix(dim=n, entries=lags[idx], source=config)


def _jacobi_sweeps(a: np.ndarray, tol: float, max_sweeps: int = 100):
    """Cyclic Jacobi rotations on a symmetric matrix, in place.

    Returns (eigenvalues, accumulated rotation matrix, sweeps used).
    Convergence is declared when the off-diagonal Frobenius norm drops
    below tol. The rotation update follows the classical stable form
    with t chosen as the smaller-magnitude root.
    """
    n = a.shape[0]
    v = np.eye(n)
    sweeps = 0

    def _off_norm() -> float:
        # summing the off-diagonal squares directly avoids the
        # catastrophic cancellation of tr(A^2) - sum(diag^2)
        strict = a[~np.eye(n, dtype=bool)]
        return math.sqrt(float((strict * strict).sum()))

    while sweeps < max_sweeps:
        off = _off_norm()
        if off < tol:
            return np.diag(a).copy(), v, sweeps
        sweeps += 1
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) < 1e-300:
                    a[p, q] = a[q, p] = 0.0
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                if abs(theta) > 1e150:
                    t = 1.0 / (2.0 * theta)  # limit form, avoids theta^2 overflow
                else:
                    t = math.copysign(1.0, theta) / (
                        abs(theta) + math.sqrt(theta * theta + 1.0)
                    )
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                # rotate rows/columns p and q
                row_p = a[p, :].copy()
                row_q = a[q, :].copy()
                a[p, :] = c * row_p - s * row_q
                a[q, :] = s * row_p + c * row_q
                col_p = a[:, p].copy()
                col_q = a[:, q].copy()
                a[:, p] = c * col_p - s * col_q
                a[:, q] = s * col_p + c * col_q
                a[p, q] = a[q, p] = 0.0
                vp = v[:, p].copy()
                v[:, p] = c * vp - s * v[:, q]
                v[:, q] = s * vp + c * v[:, q]
    off = _off_norm()
    if off < tol:
        return np.diag(a).copy(), v, sweeps
    raise ConvergenceError(off, sweeps)


def eigendecompose(R: CorrMatrix | np.ndarray) -> EigenSpectrum:
    """Full symmetric eigendecomposition with a reproducible layout.

    Eigenvalues are sorted descending; ties keep the smaller pre-sort
    index first. Each eigenvector's sign is fixed so its largest-
    magnitude entry is positive (earliest such entry wins on ties).
    """
    m = R.entries if isinstance(R, CorrMatrix) else np.asarray(R, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DomainError("eigendecompose expects a square matrix")
    if not np.allclose(m, m.T, atol=1e-12):
        raise DomainError("matrix is not symmetric")
    n = m.shape[0]
    work = np.array(m, dtype=float, copy=True)
    vals, vecs, _ = _jacobi_sweeps(work, tol=1e-12 * n)

    order = np.lexsort((np.arange(n), -vals))  # descending, stable in index
    vals = vals[order]
    vecs = vecs[:, order]
    for k in range(n):
        col = vecs[:, k]
        j = int(np.argmax(np.abs(col)))
        if col[j] < 0:
            vecs[:, k] = -col
    return EigenSpectrum(eigenvalues=vals, eigenvectors=vecs)


def cholesky(R: CorrMatrix | np.ndarray) -> CholeskyFactor:
    """Lower-triangular factor of R, with an escalating diagonal jitter.

    Correlation matrices from the Bessel kernel go numerically
    rank-deficient at large N; each failed attempt retries with the next
    shift from JITTER_LADDER. The applied shift is reported so callers
    can surface it in metadata.
    """
    m = R.entries if isinstance(R, CorrMatrix) else np.asarray(R, dtype=float)
    n = m.shape[0]
    eye = np.eye(n)
    for jit in JITTER_LADDER:
        try:
            lower = np.linalg.cholesky(m + jit * eye if jit else m)
            return CholeskyFactor(lower=lower, jitter=jit)
        except np.linalg.LinAlgError:
            continue
    raise FactorizationError(
        f"matrix not positive definite even with diagonal jitter {JITTER_LADDER[-1]:g}"
    )


def kl_truncate(spec: EigenSpectrum, K: int) -> KlSpec:
    """Keep the K dominant eigenmodes and report the energy left out.

    truncation_error = 1 - sum(lambda_1..K)/N, using the trace identity
    sum(lambda) = N for unit-diagonal correlation matrices.
    """
    K = int(K)
    n = spec.dim
    if not (1 <= K <= n):
        raise DomainError(f"truncation rank K must be in [1, {n}], got {K}")
    total = float(n)  # trace of a unit-diagonal correlation matrix
    kept = float(spec.eigenvalues[:K].sum())
    eps = max(0.0, 1.0 - kept / total)
    return KlSpec(
        rank=K,
        eigenvalues=spec.eigenvalues[:K].copy(),
        eigenvectors=spec.eigenvectors[:, :K].copy(),
        truncation_error=eps,
    )


def dump_matrix_csv(R: CorrMatrix | np.ndarray, path: str) -> None:
    """Plain-text dump of the matrix entries, row-major, 17 significant digits."""
    m = R.entries if isinstance(R, CorrMatrix) else np.asarray(R, dtype=float)
    with open(path, "w", encoding="ascii") as fh:
        for row in m:
            fh.write(",".join(f"{v:.17g}" for v in row))
            fh.write("\n")
