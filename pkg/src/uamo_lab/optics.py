"""Wave-plate decomposition of the walk and the lossy experimental realization."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import (Lattice, ModelError, ModelParams, _phase, block_diag, build_shift,
                    coin_at)

# flips the sign of h(phi)[1, 1]; used by the validation harness self-test
FAULTS = {"hwp_sign": False}


def hwp(phi: float) -> np.ndarray:
    c, s = np.cos(2 * phi), np.sin(2 * phi)
    m = np.array([[c, s], [s, -c]], dtype=complex)
    if FAULTS["hwp_sign"]:
        m[1, 1] = -m[1, 1]
    return m


def qwp(phi: float) -> np.ndarray:
    c, s = np.cos(phi), np.sin(phi)
    return np.array([[c * c + 1j * s * s, (1 - 1j) * s * c],
                     [(1 - 1j) * s * c, s * s + 1j * c * c]])


@dataclass(frozen=True)
class WavePlateAngles:
    phi1: float
    phi2: float
    phi3: float
    theta1: float
    theta2: float


def wave_plate_angles(x: int, params: ModelParams) -> WavePlateAngles:
    u = float(np.real(_phase(x, params)))
    return WavePlateAngles(
        phi1=np.pi / 4 - u * np.pi,
        phi2=np.pi / 4 - np.arccos(params.lambda2) / 2,
        phi3=np.pi / 4 + u * np.pi,
        theta1=0.0,
        # half the printed arccos(lambda1): h(theta2) must carry lambda1 on its diagonal
        theta2=np.arccos(params.lambda1) / 2,
    )


def coin_decomposition(x: int, params: ModelParams):
    a = wave_plate_angles(x, params)
    prod = qwp(a.phi3) @ hwp(a.phi2) @ qwp(a.phi1)
    return a, float(np.max(np.abs(prod - coin_at(x, params))))


def loss_element(eta: float, lattice: Lattice) -> np.ndarray:
    """M_E: amplitude factor exp(-2 pi eta) on V at every site."""
    d = np.tile([1.0, np.exp(-2 * np.pi * eta)], lattice.size)
    return np.diag(d).astype(complex)


def _displacer(n: int, spin: int, step: int) -> np.ndarray:
    """Beam displacer on n slots: moves `spin` by `step` sites, leaves the other spin."""
    m = np.zeros((2 * n, 2 * n), dtype=complex)
    i = np.arange(n)
    other = 1 - spin
    m[2 * i + other, 2 * i + other] = 1.0
    j = i + step
    ok = (j >= 0) & (j < n)
    m[2 * j[ok] + spin, 2 * i[ok] + spin] = 1.0
    return m


def shift_product(params: ModelParams, n: int) -> np.ndarray:
    """e^{2 pi eta} M_E S'2 h(theta2) S'1 h(theta1) M_E on n open slots."""
    a = wave_plate_angles(0, params)
    h1 = block_diag(np.repeat(hwp(a.theta1)[None], n, axis=0))
    h2 = block_diag(np.repeat(hwp(a.theta2)[None], n, axis=0))
    s1 = _displacer(n, 0, +1)
    s2 = _displacer(n, 1, -1)
    me = loss_element(params.eta, Lattice.open(n))
    return np.exp(2 * np.pi * params.eta) * (me @ s2 @ h2 @ s1 @ h1 @ me)


def shift_decomposition(params: ModelParams, lattice: Lattice):
    """Optical product on a window widened by one site per side, restricted back."""
    if lattice.periodic:
        raise ModelError("shift decomposition is checked on open chains")
    if lattice.size < 2:
        raise ModelError("lattice too small for the beam displacers")
    n = lattice.size
    big = shift_product(params, n + 2)
    prod = big[2:-2, 2:-2]
    return prod, float(np.max(np.abs(prod - build_shift(params, lattice))))


@dataclass
class LossyStepRecord:
    t: int
    surviving: float
    lost: float
    cumulative_lost: float


def simulate_lossy_walk(initial: np.ndarray, params: ModelParams, lattice: Lattice, t_max: int):
    """Evolve with the subunitary realized walk, tracking the intensity removed by each M_E."""
    if params.eta < 0:
        raise ModelError("lossy realization needs eta >= 0 (loss, not gain)")
    if t_max < 0:
        raise ModelError("t_max must be >= 0")
    psi = np.asarray(initial, dtype=complex).copy()
    if abs(np.vdot(psi, psi).real - 1) > 1e-9:
        raise ModelError("initial state must be normalized")
    from .model import build_coin
    me = np.tile([1.0, np.exp(-2 * np.pi * params.eta)], lattice.size)
    q = build_coin(params, lattice)
    # lossless middle part: S'2 h S'1 h, identical to e^{-2 pi eta} M_E^{-1} S M_E^{-1}
    core = np.exp(-2 * np.pi * params.eta) * (build_shift(params, lattice) / me[:, None]) / me[None, :]
    states, records, cum = [psi.copy()], [], 0.0
    for t in range(1, t_max + 1):
        before = np.vdot(psi, psi).real
        psi = me * (q @ psi)
        lost = before - np.vdot(psi, psi).real
        psi = core @ psi
        mid = np.vdot(psi, psi).real
        psi = me * psi
        lost += mid - np.vdot(psi, psi).real
        cum += lost
        states.append(psi.copy())
        records.append(LossyStepRecord(t, float(np.vdot(psi, psi).real), float(lost), float(cum)))
    return states, records


def reconstruct_overall_probability(records, eta: float) -> np.ndarray:
    """P(t) = e^{4 pi eta t} N(t) / (N(t) + cumulative loss), t = 0..len(records)."""
    out = [1.0]
    for r in records:
        out.append(np.exp(4 * np.pi * eta * r.t) * r.surviving / (r.surviving + r.cumulative_lost))
    return np.array(out)


def poisson_resample(p: np.ndarray, counts: int, rng: np.random.Generator) -> np.ndarray:
    """Shot-noise emulation: draw Poisson counts around counts*p and renormalize."""
    k = rng.poisson(counts * np.asarray(p))
    tot = k.sum()
    return k / tot if tot else np.asarray(p)
