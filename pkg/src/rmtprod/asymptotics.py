"""Large-n laws for products of Ginibre matrices.

Finite-time Lyapunov exponents λ_k = log x_k/(2n) and stability exponents
ζ_k = log|z_k|/n converge to μ_k = ½log(2/β) + ½ψ(β(ν+k)/2) with Gaussian
fluctuations of width σ_k/√n, σ_k² = ¼ψ′(β(ν+k)/2).  Here σ_k is always a
standard deviation; the variance is ``sigma**2``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special as sc

from .errors import DomainError, ValidationError

__all__ = [
    "ExponentLaw",
    "PhaseAtoms",
    "crystallized_peaks",
    "exponent_law",
    "phase_atoms",
    "phase_density",
    "triangular_cdf",
    "triangular_density",
]


@dataclass(frozen=True)
class ExponentLaw:
    """Limiting mean and fluctuation scale of the k-th exponent."""

    beta: int
    nu_inf: float
    k: int
    mu: float
    sigma: float

    def width(self, n: int) -> float:
        """Standard deviation σ_k/√n of the exponent after n factors."""
        return self.sigma / math.sqrt(n)


def _check_beta(beta):
    if beta not in (1, 2, 4):
        raise ValidationError("beta must be 1, 2 or 4")


def exponent_law(beta: int, nu_inf: float, k: int) -> ExponentLaw:
    """μ_k and σ_k for Dyson index β, limiting charge ν_∞ and index k ≥ 1."""
    _check_beta(beta)
    if k < 1 or int(k) != k:
        raise ValidationError("k must be a positive integer")
    if nu_inf < 0:
        raise ValidationError("nu_inf must be non-negative")
    arg = beta * (nu_inf + k) / 2.0
    mu = 0.5 * math.log(2.0 / beta) + 0.5 * float(sc.digamma(arg))
    sigma = 0.5 * math.sqrt(float(sc.polygamma(1, arg)))
    return ExponentLaw(beta, float(nu_inf), int(k), mu, sigma)


@dataclass(frozen=True)
class PhaseAtoms:
    """Atomic phase law: point masses ``weights`` at angles ``angles``."""

    angles: tuple
    weights: tuple


def phase_atoms(beta: int) -> PhaseAtoms:
    """Atomic description of the limiting phase law (only β=1 is atomic)."""
    _check_beta(beta)
    if beta != 1:
        raise DomainError("the phase law is atomic only for beta=1")
    return PhaseAtoms((0.0, math.pi), (0.5, 0.5))


def phase_density(beta: int, theta):
    """Limiting density of eigenvalue phases on [0, 2π).

    β=2 is uniform.  β=4 is (2/π) sin²θ on [0, π], the upper half plane of
    the conjugate-pair spectrum.  β=1 is atomic; use :func:`phase_atoms`.
    """
    _check_beta(beta)
    if beta == 1:
        raise DomainError("beta=1 phase law is atomic; use phase_atoms")
    th = np.asarray(theta, dtype=float)
    if np.any((th < 0) | (th >= 2 * math.pi)):
        raise DomainError("theta must lie in [0, 2π)")
    if beta == 2:
        out = np.full(th.shape, 1.0 / (2 * math.pi))
    else:
        out = np.where(th <= math.pi, 2.0 / math.pi * np.sin(th) ** 2, 0.0)
    return float(out) if out.ndim == 0 else out


def triangular_density(x):
    """Density 2x on (0, 1), zero elsewhere."""
    xa = np.asarray(x, dtype=float)
    out = np.where((xa > 0) & (xa < 1), 2.0 * xa, 0.0)
    return float(out) if out.ndim == 0 else out


def triangular_cdf(x):
    """CDF of the triangular law, min(max(x, 0), 1)²."""
    out = np.clip(np.asarray(x, dtype=float), 0.0, 1.0) ** 2
    return float(out) if out.ndim == 0 else out


def crystallized_peaks(model, k_max: int) -> list[tuple[float, float]]:
    """Predicted radii e^{μ_k} and log-radius widths σ_k/√n for k = 1..k_max.

    Radii refer to the per-factor scale |z|^{1/n}: the density of
    ζ = log|z|/n near the origin concentrates at ζ = μ_k.

    ``model`` is a β=2 :class:`rmtprod.eigen.EigenModel`.  With unequal
    charges μ_k and σ_k² are averaged over the factors, which reduces to
    :func:`exponent_law` when all charges coincide.
    """
    if getattr(model, "beta", None) != 2:
        raise ValidationError("crystallized_peaks needs a beta=2 model")
    if k_max < 1:
        raise ValidationError("k_max must be at least 1")
    nus = np.asarray(model.charges, dtype=float)
    n = len(nus)
    out = []
    for k in range(1, int(k_max) + 1):
        mu = 0.5 * float(np.mean(sc.digamma(nus + k)))
        sigma = 0.5 * math.sqrt(float(np.mean(sc.polygamma(1, nus + k))))
        out.append((math.exp(mu), sigma / math.sqrt(n)))
    return out
