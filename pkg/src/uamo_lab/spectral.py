"""Dense spectra on approximant rings, PT-phase classification and winding numbers."""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as la

from .dynamics import participation_ratio, site_weights
from .model import (FloquetOperator, Lattice, ModelError, ModelParams, Variant, build_coin,
                    build_floquet, build_shift)

DENSE_CAP = 1024
TOL_GAP = 1e-4
TOL_NO_LOSS = 1e-4


class SpectralError(RuntimeError):
    """Numerical failure in an eigensolve or winding computation."""


class NoLossNotFound(LookupError):
    pass


class Phase(enum.Enum):
    PT_UNBROKEN = "PTUnbroken"
    PT_BROKEN = "PTBroken"
    FULLY_COMPLEX = "FullyComplex"


def quasienergy(z: np.ndarray) -> np.ndarray:
    """E with z = exp(iE), Re E = arg z in (-pi, pi]."""
    z = np.asarray(z)
    return np.angle(z) - 1j * np.log(np.abs(z))


def tol_unit(matrix: np.ndarray) -> float:
    return 1e-6 * max(1.0, float(np.linalg.norm(matrix, 1)))


@dataclass
class SpectrumResult:
    z: np.ndarray
    vectors: np.ndarray | None
    lattice: Lattice
    params: ModelParams
    tol_unit: float
    tol_gap: float = TOL_GAP

    @property
    def E(self) -> np.ndarray:
        return quasienergy(self.z)

    @property
    def phase(self) -> "PhaseReport":
        return classify_pt_phase(self, self.tol_unit, self.tol_gap)


def eigendecompose(op: FloquetOperator, vectors: bool = False, cap: int = DENSE_CAP) -> SpectrumResult:
    if not op.lattice.periodic:
        raise ModelError("spectra are computed on periodic approximant rings")
    if op.dim > cap:
        raise ModelError(f"2N = {op.dim} exceeds the dense cap {cap}")
    m = op.matrix()
    try:
        if vectors:
            z, v = la.eig(m)
        else:
            z, v = la.eigvals(m), None
    except (la.LinAlgError, ValueError) as e:
        raise SpectralError(f"eigensolve failed: {e} (cond estimate {np.linalg.cond(m):.3g})") from e
    if not np.all(np.isfinite(z)):
        raise SpectralError("non-finite eigenvalues")
    order = np.lexsort((np.abs(z), np.round(np.angle(z), 12)))
    z = z[order]
    if v is not None:
        v = v[:, order]
        v = v / np.linalg.norm(v, axis=0)
    return SpectrumResult(z, v, op.lattice, op.params, tol_unit(m))


def spectrum(params: ModelParams, n: int, vectors: bool = False) -> SpectrumResult:
    return eigendecompose(build_floquet(params, Lattice.ring(n)), vectors=vectors)


@dataclass
class PhaseReport:
    phase: Phase
    max_unit_deviation: float
    min_log_modulus: float
    max_abs_im_E: float
    near_unit_count: int
    boundary_zone: bool

    def to_dict(self) -> dict:
        d = dict(self.__dict__)
        d["phase"] = self.phase.value
        return d


def classify_pt_phase(spec: SpectrumResult, tol_u: float | None = None, tol_g: float = TOL_GAP) -> PhaseReport:
    tol_u = spec.tol_unit if tol_u is None else tol_u
    r = np.abs(spec.z)
    dev = float(np.max(np.abs(r - 1)))
    lnr = np.abs(np.log(r))
    mn = float(lnr.min())
    if dev < tol_u:
        phase = Phase.PT_UNBROKEN
    elif mn > tol_g:
        phase = Phase.FULLY_COMPLEX
    else:
        phase = Phase.PT_BROKEN
    # decision statistic within a decade of its threshold
    boundary = (tol_u / 10 < dev < tol_u * 10) or (tol_g / 10 < mn < tol_g * 10)
    return PhaseReport(phase, dev, mn, float(lnr.max()), int(np.sum(lnr < tol_g)), bool(boundary))


# ---- no-loss states and decay fits

@dataclass
class NoLossState:
    index: int
    z: complex
    E: complex
    vector: np.ndarray
    slot: int
    center: int
    participation_ratio: float


def find_no_loss_states(spec: SpectrumResult, tol: float = TOL_NO_LOSS) -> list:
    if spec.vectors is None:
        raise ModelError("eigenvectors required")
    E = spec.E
    out = []
    for k in np.flatnonzero(np.abs(E.imag) < tol):
        w = site_weights(spec.vectors[:, k])
        slot = int(np.argmax(w))  # first maximum: smallest index on ties
        out.append(NoLossState(int(k), complex(spec.z[k]), complex(E[k]), spec.vectors[:, k], slot,
                               int(spec.lattice.positions[slot]), participation_ratio(w)))
    return out


class DecayFitError(ValueError):
    pass


def eigenstate_decay_fit(state: np.ndarray, center: int, lattice: Lattice, floor: float = -55.0,
                         min_decades: float = 6.0, site_probabilities: bool = False) -> dict:
    """Least-squares decay rates of log site probability on each side of `center` (a position).

    Points are used outward from the center until log(p/p_center) first drops below `floor`.
    Rates are in the probability convention (twice the amplitude rate).
    """
    p = np.asarray(state, float) if site_probabilities else site_weights(state)
    n = lattice.size
    x = lattice.positions
    c = lattice.index(center)
    with np.errstate(divide="ignore"):
        lp = np.log(p) - np.log(p[c])
    if lattice.periodic:
        d = (np.arange(n) - c + n // 2) % n - n // 2
    else:
        d = np.arange(n) - c
    out = {}
    for name, side in (("left", -1), ("right", 1)):
        m = side * d >= 1
        dd, ll = side * d[m], lp[m]
        o = np.argsort(dd)
        dd, ll = dd[o], ll[o]
        bad = ~(ll >= floor)
        stop = int(np.argmax(bad)) if bad.any() else len(ll)
        dd, ll = dd[:stop], ll[:stop]
        if len(dd) < 3:
            raise DecayFitError(f"{name} side: fewer than 3 usable points")
        slope = np.polyfit(dd, ll, 1)[0]
        out[name] = float(-slope)
        out[f"{name}_points"] = int(len(dd))
        out[f"{name}_decades"] = float(-ll.min() / np.log(10))
    out["asymmetry"] = out["left"] - out["right"]
    out["low_dynamic_range"] = bool(min(out["left_decades"], out["right_decades"]) < min_decades)
    return out


# ---- winding number

@dataclass
class WindingResult:
    z: complex
    M: int
    nu: float
    nu_hat: int
    max_jump: float
    valid: bool
    reason: str = ""

    def to_row(self, eta: float) -> list:
        return [eta, self.z.real, self.z.imag, self.nu, self.nu_hat, int(self.valid)]


JUMP_MAX = np.pi / 2


def _dual_stack(params: ModelParams, lattice: Lattice, thetas: np.ndarray) -> np.ndarray:
    """S_{lambda2,0} Q_{lambda1}(theta - i eta) for each theta; det(W# - z) is the det of this minus z."""
    swapped = params.with_(lambda1=params.lambda2, lambda2=params.lambda1)
    s = build_shift(swapped, lattice, eta=0.0)
    return np.array([s @ build_coin(swapped, lattice, theta=t - 1j * params.eta) for t in thetas])


def gap_threshold(lattice: Lattice) -> float:
    return np.pi / lattice.size


def _reference_spectrum(params: ModelParams, lattice: Lattice) -> np.ndarray:
    return la.eigvals(build_floquet(params.with_(eta=0.0, theta=0.0), lattice).matrix())


def _winding_from_stack(stack_fn, z: complex, M: int, M_cap: int, period_factor: float):
    while True:
        mats = stack_fn(M)
        sign, _ = np.linalg.slogdet(mats - z * np.eye(mats.shape[1]))
        d = np.angle(sign[1:] / sign[:-1])
        jump = float(np.max(np.abs(d)))
        if jump < JUMP_MAX or M >= M_cap:
            nu = float(d.sum() / (2 * np.pi)) * period_factor
            return nu, M, jump
        M *= 2


def winding_profile(params: ModelParams, lattice: Lattice, z_count: int = 32, M: int = 256,
                    M_cap: int = 8192, bases=None, gap: float | None = None) -> list:
    """Winding nu(z) = (1/N)(1/2 pi) d arg det(W(theta) - z) over theta, via the complexified dual.

    The integrand has period 1/q in theta, so one period is sampled and rescaled by q/N.
    """
    if not lattice.periodic:
        raise ModelError("winding needs a periodic approximant ring")
    lattice.check_flux(params)
    q = params.phi.denominator
    if bases is None:
        bases = np.exp(2j * np.pi * np.arange(z_count) / z_count)
    ref = _reference_spectrum(params, lattice)
    gap = gap_threshold(lattice) if gap is None else gap
    cache = {}

    def stack(m):
        if m not in cache:
            cache[m] = _dual_stack(params, lattice, params.theta + np.arange(m + 1) / (m * q))
        return cache[m]

    out = []
    for z in bases:
        z = complex(z)
        dist = float(np.min(np.abs(ref - z)))
        if dist <= gap:
            out.append(WindingResult(z, 0, float("nan"), 0, float("nan"), False, "base point inside spectrum"))
            continue
        nu, m_used, jump = _winding_from_stack(stack, z, M, M_cap, q / lattice.size)
        nh = int(round(nu))
        ok = jump < JUMP_MAX and abs(nu - nh) < 1e-6 and abs(nh) <= 1
        out.append(WindingResult(z, m_used, nu, nh, jump, ok, "" if ok else "phase tracking failed"))
    return out


def winding_number(params: ModelParams, lattice: Lattice, z: complex, M: int = 256, M_cap: int = 8192) -> WindingResult:
    if abs(abs(z) - 1) > 1e-12:
        raise ModelError("base point must lie on the unit circle")
    r = winding_profile(params, lattice, bases=[z], M=M, M_cap=M_cap)[0]
    if r.reason == "base point inside spectrum":
        raise ModelError(f"base point {z} lies inside the eta=0 spectrum")
    if not r.valid:
        raise SpectralError(f"winding phase tracking failed at z={z} (max jump {r.max_jump:.3g})")
    return r


def widest_gap_point(params: ModelParams, lattice: Lattice) -> complex:
    a = np.sort(np.angle(_reference_spectrum(params, lattice)))
    g = np.diff(np.r_[a, a[0] + 2 * np.pi])
    k = int(np.argmax(g))
    return complex(np.exp(1j * (a[k] + g[k] / 2)))


def winding_regime(profile: list) -> str:
    vals = [abs(r.nu_hat) for r in profile if r.valid]
    if not vals:
        return "undetermined"
    if all(v == 0 for v in vals):
        return "all0"
    if all(v == 1 for v in vals):
        return "all1"
    return "some1"


# ---- transition location

def _bisect(pred, lo: float, hi: float, resolution: float) -> float:
    """Smallest eta in (lo, hi] with pred true, assuming pred(lo) false and pred(hi) true."""
    while hi - lo > resolution:
        mid = 0.5 * (lo + hi)
        if pred(mid):
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def classifier_transitions(lambda1: float, lambda2: float, n: int, theta: float = 0.0,
                           eta_max: float = 0.6, resolution: float = 1e-3) -> dict:
    """Bisect eta against the three-way classifier on the Fibonacci ring of n sites."""
    base = ModelParams(lambda1, lambda2, theta, 0.0, _ring_flux(n))
    memo = {}

    def phase(eta):
        if eta not in memo:
            memo[eta] = spectrum(base.with_(eta=eta), n).phase.phase
        return memo[eta]

    if phase(eta_max) is not Phase.FULLY_COMPLEX:
        raise SpectralError(f"spectrum not fully complex at eta_max={eta_max}")
    first = _bisect(lambda e: phase(e) is not Phase.PT_UNBROKEN, 0.0, eta_max, resolution)
    second = _bisect(lambda e: phase(e) is Phase.FULLY_COMPLEX, 0.0, eta_max, resolution)
    return dict(n=n, first=first, second=second, evaluations=len(memo))


def winding_transitions(lambda1: float, lambda2: float, n: int, z_count: int = 32, M: int = 256,
                        eta_max: float = 0.6, resolution: float = 1e-3) -> dict:
    """Bisect eta against the winding profile: first |nu|=1 anywhere, then everywhere."""
    base = ModelParams(lambda1, lambda2, 0.0, 0.0, _ring_flux(n))
    lat = Lattice.ring(n)
    memo = {}

    def regime(eta):
        if eta not in memo:
            memo[eta] = winding_regime(winding_profile(base.with_(eta=eta), lat, z_count, M))
        return memo[eta]

    first = _bisect(lambda e: regime(e) != "all0", 0.0, eta_max, resolution)
    second = _bisect(lambda e: regime(e) == "all1", first, eta_max, resolution)
    return dict(n=n, first=first, second=second, evaluations=len(memo))


def _ring_flux(n: int):
    from .model import fibonacci_ring
    return fibonacci_ring(n)
