"""Outage analysis for fluid antenna systems over correlated Rayleigh fading.

The package models an antenna aperture of W wavelengths whose port
gains form a correlated complex-Gaussian field, and computes the outage
probability of best-port selection by three analytical routes plus a
seeded Monte Carlo oracle:

  kernels      correlation kernels (Bessel and squared-exponential),
               spectra, spectral moments
  fieldmodel   port grids, correlation matrices, eigenstructure,
               Cholesky sampling factors
  kl_outage    rank-K eigenmode truncations: closed-form rank 1,
               disk-intersection rank 2, tensor quadrature to rank 4
  dof          effective degrees-of-freedom metrics
  bounds       equi-correlated comparison bounds (two-sided sandwich
               and block-refined products)
  continuum    dense-aperture extreme-value asymptotics
  montecarlo   reproducible parallel-stream simulation oracle
  specialfn    self-contained special functions and quadrature rules
  cli          the fas-extremes experiment driver
"""

__version__ = "0.1.0"

from .kernels import CorrelationModel  # noqa: F401
