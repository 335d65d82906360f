"""Closed-form critical values, Lyapunov exponents and the Hatano-Nelson comparison model."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import Lattice, ModelError

TWO_PI = 2 * math.pi


def _check(lambda1, lambda2):
    if not (0 < lambda1 <= 1):
        raise ModelError("lambda1 must lie in (0, 1]; lambda1 = 0 decouples the walk")
    if not (0 <= lambda2 <= 1):
        raise ModelError("lambda2 must lie in [0, 1]")


def lambda0(lambda1: float, lambda2: float) -> float:
    _check(lambda1, lambda2)
    l1p, l2p = math.sqrt(1 - lambda1**2), math.sqrt(1 - lambda2**2)
    return lambda2 * (1 + l1p) / (lambda1 * (1 + l2p))


def eta0(lambda1: float) -> float:
    _check(lambda1, 0.0)
    l1p = math.sqrt(1 - lambda1**2)
    return math.log((1 + l1p) / lambda1) / TWO_PI


@dataclass(frozen=True)
class CriticalPoints:
    lambda0: float
    L_hermitian: float
    eta_pt: float
    eta0: float

    def to_dict(self) -> dict:
        return dict(lambda0=self.lambda0, L=self.L_hermitian, eta_pt=self.eta_pt, eta0=self.eta0)


def critical_points(lambda1: float, lambda2: float) -> CriticalPoints:
    lam = lambda0(lambda1, lambda2)
    L = max(0.0, math.log(lam)) if lam > 0 else 0.0
    return CriticalPoints(lam, L, L / TWO_PI, eta0(lambda1))


def dual_lyapunov(lambda1: float, lambda2: float, eta: float) -> float:
    """L# = max{0, -log lambda0 + 2 pi |eta| - 2 pi max{0, |eta| - eta0}}."""
    lam = lambda0(lambda1, lambda2)
    a = abs(eta)
    log_lam = math.log(lam) if lam > 0 else -math.inf
    return max(0.0, -log_lam + TWO_PI * a - TWO_PI * max(0.0, a - eta0(lambda1)))


def localization_boundary(lambda1: float, eta: float) -> float:
    """Critical lambda2 of the non-Hermitian localization transition (1 above the threshold)."""
    _check(lambda1, 0.0)
    a = abs(eta)
    e2, e4 = math.exp(TWO_PI * a), math.exp(2 * TWO_PI * a)
    if lambda1 > 2 * e2 / (1 + e4):
        return 1.0
    l1p = math.sqrt(1 - lambda1**2)
    return 2 * e2 * lambda1 * (1 + l1p) / (2 * (1 + l1p) + lambda1**2 * (e4 - 1))


def localization_threshold(eta: float) -> float:
    """lambda1 above which the boundary saturates at lambda2 = 1."""
    a = abs(eta)
    return 2 * math.exp(TWO_PI * a) / (1 + math.exp(2 * TWO_PI * a))


# ---- Hatano-Nelson / non-Hermitian AAH

@dataclass(frozen=True)
class HatanoNelsonParams:
    lam: float
    eta: float = 0.0
    theta: float = 0.0
    phi: float = (math.sqrt(5) - 1) / 2

    def __post_init__(self):
        if not self.lam > 0:
            raise ModelError("lambda must be > 0")


def hatano_nelson_matrix(params: HatanoNelsonParams, lattice: Lattice) -> np.ndarray:
    """(H psi)_n = e^{2 pi eta} psi_{n+1} + e^{-2 pi eta} psi_{n-1} + 2 lam cos(2 pi (phi n + theta)) psi_n."""
    n = lattice.size
    x = lattice.positions
    h = np.diag(2 * params.lam * np.cos(TWO_PI * (params.phi * x + params.theta))).astype(complex)
    i = np.arange(n - 1)
    h[i, i + 1] = math.exp(TWO_PI * params.eta)
    h[i + 1, i] = math.exp(-TWO_PI * params.eta)
    if lattice.periodic and n > 2:
        h[n - 1, 0] = math.exp(TWO_PI * params.eta)
        h[0, n - 1] = math.exp(-TWO_PI * params.eta)
    return h


def hatano_nelson_lyapunov(lam: float, eta: float) -> float:
    if not lam > 0:
        raise ModelError("lambda must be > 0")
    return math.log(lam) + TWO_PI * abs(eta)


def transfer_matrix_lyapunov_hn(params: HatanoNelsonParams, energy: float, n_steps: int = 100_000,
                                renorm_every: int = 16) -> float:
    """Growth rate of the AAH cocycle with the phase complexified to theta + i eta.

    The non-reciprocal hoppings are a gauge (skin) transform of the reciprocal chain; their effect on
    the spectrum-side Lyapunov exponent enters through the imaginary shift of the phase.
    """
    if n_steps < 1:
        raise ModelError("n_steps must be >= 1")
    k = np.arange(n_steps)
    v = (2 * params.lam * np.cos(TWO_PI * (params.phi * k + params.theta + 1j * params.eta))).tolist()
    a, b, c, d = 1 + 0j, 0j, 0j, 1 + 0j
    total = 0.0
    for j in range(n_steps):
        e = energy - v[j]
        a, b, c, d = e * a - c, e * b - d, a, b
        if (j + 1) % renorm_every == 0 or j == n_steps - 1:
            nrm = float(np.linalg.norm(np.array([[a, b], [c, d]]), 2))
            total += math.log(nrm)
            a, b, c, d = a / nrm, b / nrm, c / nrm, d / nrm
    return total / n_steps
