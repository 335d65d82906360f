"""Time evolution and dynamical observables."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import FloquetOperator, Lattice, ModelError


def evolve(initial: np.ndarray, op: FloquetOperator, t_max: int, check_size: bool = True) -> np.ndarray:
    """States t = 0..t_max (unnormalized), shape (t_max + 1, 2N)."""
    if t_max < 0:
        raise ModelError("t_max must be >= 0")
    lat = op.lattice
    if check_size and not lat.periodic and lat.size < 2 * t_max + 5:
        raise ModelError(f"open lattice of {lat.size} sites too small for {t_max} steps (need {2 * t_max + 5})")
    out = np.empty((t_max + 1, op.dim), dtype=complex)
    out[0] = initial
    psi = np.asarray(initial, dtype=complex)
    for t in range(1, t_max + 1):
        psi = op.apply(psi)
        out[t] = psi
    return out


def site_weights(state: np.ndarray) -> np.ndarray:
    p = np.abs(np.asarray(state)) ** 2
    return p[0::2] + p[1::2]


def position_distribution(state: np.ndarray) -> np.ndarray:
    w = site_weights(state)
    tot = w.sum()
    if tot == 0 or not np.isfinite(tot):
        raise ModelError("zero or non-finite state")
    return w / tot


def mean_position(p: np.ndarray, x: np.ndarray) -> float:
    return float(np.dot(p, x))


def standard_deviation(p: np.ndarray, x: np.ndarray) -> float:
    m = np.dot(p, x)
    return float(np.sqrt(max(0.0, np.dot(p, x * x) - m * m)))


def second_moment(p: np.ndarray, x: np.ndarray) -> float:
    return float(np.dot(p, x * x))


def overall_probability(state: np.ndarray) -> float:
    return float(np.vdot(state, state).real)


def similarity(pa: np.ndarray, pb: np.ndarray, tol: float = 1e-9) -> float:
    """[sum sqrt(Pa Pb)]^2 for two normalized distributions."""
    pa, pb = np.asarray(pa, float), np.asarray(pb, float)
    if abs(pa.sum() - 1) > tol or abs(pb.sum() - 1) > tol:
        raise ModelError("similarity needs normalized distributions")
    return float(min(1.0, np.sum(np.sqrt(pa * pb)) ** 2))


def participation_ratio(p: np.ndarray) -> float:
    p = np.asarray(p, float)
    return float(p.sum() ** 2 / np.sum(p * p))


@dataclass
class ObservableSeries:
    t: np.ndarray
    x: np.ndarray
    P: np.ndarray          # (T, N) normalized distributions
    sigma: np.ndarray
    mean: np.ndarray
    second_moment: np.ndarray
    overall_P: np.ndarray
    similarity: np.ndarray | None = None


def observables(states: np.ndarray, lattice: Lattice, reference: np.ndarray | None = None) -> ObservableSeries:
    x = lattice.positions.astype(float)
    P = np.array([position_distribution(s) for s in states])
    sig = np.array([standard_deviation(p, x) for p in P])
    mean = P @ x
    x2 = P @ (x * x)
    tot = np.array([overall_probability(s) for s in states])
    sim = None
    if reference is not None:
        sim = np.array([similarity(a, b) for a, b in zip(P, reference)])
    return ObservableSeries(np.arange(len(states)), x, P, sig, mean, x2, tot, sim)


def linear_fit(t: np.ndarray, y: np.ndarray):
    """Slope, intercept and R^2 of a least-squares line."""
    slope, icpt = np.polyfit(t, y, 1)
    resid = y - (slope * t + icpt)
    ss = np.sum((y - y.mean()) ** 2)
    r2 = 1 - np.sum(resid**2) / ss if ss > 0 else 1.0
    return float(slope), float(icpt), float(r2)


def prepare_no_loss_initial(spectrum, tol: float = 1e-4):
    """Project the most concentrated no-loss eigenstate onto its peak site and renormalize."""
    from .spectral import NoLossNotFound, find_no_loss_states
    states = find_no_loss_states(spectrum, tol)
    if not states:
        raise NoLossNotFound(f"no eigenvalue with |Im E| < {tol}")
    best = min(states, key=lambda s: (s.participation_ratio, s.index))
    psi = np.zeros_like(best.vector)
    i = best.slot
    psi[2 * i:2 * i + 2] = best.vector[2 * i:2 * i + 2]
    psi /= np.linalg.norm(psi)
    return psi, best


def short_time_projection_check(initial: np.ndarray, spectrum, index: int, t_max: int, cond_max: float = 1e8):
    """Weight of psi(t) on eigenvector `index` relative to the total, from the eigen-expansion."""
    v = spectrum.vectors
    if v is None:
        raise ModelError("eigenvectors required")
    cond = np.linalg.cond(v)
    if cond > cond_max:
        raise ModelError(f"eigenbasis ill-conditioned (cond {cond:.3g})")
    c = np.linalg.solve(v, initial)
    out = []
    for t in range(t_max + 1):
        ct = c * spectrum.z**t
        w = np.abs(ct) ** 2
        out.append(w[index] / w.sum())
    return dict(weights=np.array(out), condition=float(cond))
