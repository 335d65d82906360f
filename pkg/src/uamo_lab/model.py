"""Floquet operator of the (P)UAMO quantum walk on finite lattices.

Amplitude layout: index 2*i + s for lattice slot i and spin s (0 = H, 1 = V).
Slot i sits at position x = i - origin.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction

import numpy as np

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


class ModelError(ValueError):
    """Invalid parameters or lattice for the requested construction."""


def fibonacci_approximant(n_min: int) -> Fraction:
    """Smallest Fibonacci ratio F_{k-1}/F_k with F_k >= n_min."""
    a, b = 1, 1
    while b < n_min:
        a, b = b, a + b
    return Fraction(a, b)


def fibonacci_ring(n: int) -> Fraction:
    """Approximant of the golden flux whose denominator is exactly n (a Fibonacci number)."""
    f = fibonacci_approximant(n)
    if f.denominator != n:
        raise ModelError(f"{n} is not a Fibonacci number")
    return f


@dataclass(frozen=True)
class ModelParams:
    lambda1: float
    lambda2: float
    theta: float = 0.0
    eta: float = 0.0
    phi: float | Fraction = GOLDEN

    def __post_init__(self):
        for name in ("lambda1", "lambda2"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and 0.0 <= v <= 1.0):
                raise ModelError(f"{name} must lie in [0, 1], got {v!r}")
        if not math.isfinite(self.eta):
            raise ModelError("eta must be finite")
        if not math.isfinite(self.theta):
            raise ModelError("theta must be finite")
        if isinstance(self.phi, Fraction):
            if math.gcd(self.phi.numerator, self.phi.denominator) != 1 or not 0 <= self.phi <= 1:
                raise ModelError(f"bad approximant {self.phi}")
        elif not 0.0 <= float(self.phi) <= 1.0:
            raise ModelError(f"phi must lie in [0, 1], got {self.phi!r}")

    @property
    def lambda1p(self) -> float:
        return math.sqrt(max(0.0, 1.0 - self.lambda1**2))

    @property
    def lambda2p(self) -> float:
        return math.sqrt(max(0.0, 1.0 - self.lambda2**2))

    def with_(self, **kw) -> "ModelParams":
        return replace(self, **kw)

    def to_dict(self) -> dict:
        phi = self.phi
        phi = f"{phi.numerator}/{phi.denominator}" if isinstance(phi, Fraction) else float(phi)
        return dict(lambda1=self.lambda1, lambda2=self.lambda2, theta=self.theta, eta=self.eta, phi=phi)


class Boundary(enum.Enum):
    OPEN = "open"
    PERIODIC = "periodic"


@dataclass(frozen=True)
class Lattice:
    size: int
    boundary: Boundary = Boundary.OPEN
    origin: int | None = None

    def __post_init__(self):
        if not isinstance(self.size, (int, np.integer)) or self.size < 1:
            raise ModelError(f"lattice size must be a positive integer, got {self.size!r}")
        if self.origin is None:
            o = (self.size - 1) // 2 if self.boundary is Boundary.OPEN else 0
            object.__setattr__(self, "origin", o)
        if not 0 <= self.origin < self.size:
            raise ModelError("origin outside the lattice")

    @classmethod
    def open(cls, size: int) -> "Lattice":
        return cls(size, Boundary.OPEN)

    @classmethod
    def ring(cls, size: int) -> "Lattice":
        return cls(size, Boundary.PERIODIC)

    @property
    def periodic(self) -> bool:
        return self.boundary is Boundary.PERIODIC

    @property
    def dim(self) -> int:
        return 2 * self.size

    @property
    def positions(self) -> np.ndarray:
        return np.arange(self.size) - self.origin

    def index(self, x: int) -> int:
        i = x + self.origin
        if self.periodic:
            return i % self.size
        if not 0 <= i < self.size:
            raise ModelError(f"site {x} outside the lattice")
        return i

    def check_flux(self, params: ModelParams):
        if not self.periodic:
            return
        if not isinstance(params.phi, Fraction):
            raise ModelError("periodic lattice needs a rational approximant flux p/q")
        if self.size % params.phi.denominator:
            raise ModelError(f"approximant denominator {params.phi.denominator} must divide N={self.size}")

    def to_dict(self) -> dict:
        return dict(size=int(self.size), boundary=self.boundary.value, origin=int(self.origin))


def _phase(x, params: ModelParams, theta=None):
    """x*Phi + theta, reduced exactly when Phi is a Fraction."""
    th = params.theta if theta is None else theta
    x = np.asarray(x)
    if isinstance(params.phi, Fraction):
        p, q = params.phi.numerator, params.phi.denominator
        return np.mod(x * p, q) / q + th
    return x * float(params.phi) + th


def coin_at(x, params: ModelParams, theta=None) -> np.ndarray:
    """Q_x of the quasiperiodic coin. theta may be complex (complexified phase)."""
    return coins_at(np.atleast_1d(x), params, theta)[0]


def coins_at(xs, params: ModelParams, theta=None) -> np.ndarray:
    """Stack of 2x2 coins, shape (len(xs), 2, 2)."""
    a = 2 * np.pi * _phase(xs, params, theta)
    l2, l2p = params.lambda2, params.lambda2p
    c, s = l2 * np.cos(a), l2 * np.sin(a)
    q = np.empty((len(a), 2, 2), dtype=complex)
    q[:, 0, 0] = c + 1j * l2p
    q[:, 0, 1] = -s
    q[:, 1, 0] = s
    q[:, 1, 1] = c - 1j * l2p
    return q


def block_diag(blocks: np.ndarray) -> np.ndarray:
    n = len(blocks)
    m = np.zeros((2 * n, 2 * n), dtype=complex)
    i = np.arange(n)
    for a in range(2):
        for b in range(2):
            m[2 * i + a, 2 * i + b] = blocks[:, a, b]
    return m


def build_coin(params: ModelParams, lattice: Lattice, theta=None) -> np.ndarray:
    lattice.check_flux(params)
    return block_diag(coins_at(lattice.positions, params, theta))


def build_shift(params: ModelParams, lattice: Lattice, eta=None, twist: float = 0.0) -> np.ndarray:
    """Dense shift S_{lambda1,eta}. twist adds a flux phase on the seam bond of a ring."""
    lattice.check_flux(params)
    eta = params.eta if eta is None else eta
    n = lattice.size
    l1, l1p = params.lambda1, params.lambda1p
    s = np.zeros((2 * n, 2 * n), dtype=complex)
    i = np.arange(n)
    s[2 * i + 1, 2 * i] = l1p
    s[2 * i, 2 * i + 1] = -l1p
    right, left = np.exp(2 * np.pi * eta) * l1, np.exp(-2 * np.pi * eta) * l1
    if lattice.periodic:
        j = (i + 1) % n
        s[2 * j, 2 * i] = right * np.where(i == n - 1, np.exp(1j * twist), 1.0)
        j = (i - 1) % n
        s[2 * j + 1, 2 * i + 1] = left * np.where(i == 0, np.exp(-1j * twist), 1.0)
    else:
        # hops leaving the window are dropped
        s[2 * i[1:], 2 * i[:-1]] = right
        s[2 * i[:-1] + 1, 2 * i[1:] + 1] = left
    return s


def coin_sqrt(q: np.ndarray) -> np.ndarray:
    """Principal square root of a 2x2 special-unitary matrix, eigenphases in (-pi/2, pi/2]."""
    q = np.asarray(q, dtype=complex)
    w, v = np.linalg.eig(q)
    ph = np.angle(w)
    if np.all(np.abs(np.abs(ph) - np.pi) < 1e-12):
        raise ModelError("coin with eigenvalue -1 twice: square-root branch is ambiguous")
    ph = np.where(ph <= -np.pi + 1e-15, np.pi, ph)
    if abs(w[0] - w[1]) < 1e-12:
        # scalar matrix, eigenvectors may be degenerate
        return np.exp(0.5j * ph[0]) * np.eye(2)
    return v @ np.diag(np.exp(0.5j * ph)) @ np.linalg.inv(v)


class Variant(enum.Enum):
    STANDARD = "standard"
    SYMMETRIZED = "symmetrized"
    DUAL = "dual"
    LOSSY_REALIZED = "lossy_realized"


@dataclass(frozen=True)
class FloquetOperator:
    params: ModelParams
    lattice: Lattice
    variant: Variant = Variant.STANDARD
    meta: dict = field(default_factory=dict, compare=False)
    _dense: list = field(default_factory=list, repr=False, compare=False)

    @property
    def dim(self) -> int:
        return self.lattice.dim

    def matrix(self) -> np.ndarray:
        if not self._dense:
            self._dense.append(_dense_variant(self))
        return self._dense[0]

    def apply(self, psi: np.ndarray) -> np.ndarray:
        """Matrix-free W psi for the Standard and LossyRealized variants."""
        if self.variant not in (Variant.STANDARD, Variant.LOSSY_REALIZED) or self._dense:
            return self.matrix() @ psi
        p = self.params
        q = self.meta.get("_coins")
        if q is None:
            q = coins_at(self.lattice.positions, p)
            self.meta["_coins"] = q
        v = np.asarray(psi).reshape(-1, 2)
        v = np.einsum("xij,xj->xi", q, v)
        out = np.empty_like(v)
        right = np.exp(2 * np.pi * p.eta) * p.lambda1
        left = np.exp(-2 * np.pi * p.eta) * p.lambda1
        if self.variant is Variant.LOSSY_REALIZED:
            right, left = right * np.exp(-2 * np.pi * p.eta), left * np.exp(-2 * np.pi * p.eta)
            flip = p.lambda1p * np.exp(-2 * np.pi * p.eta)
        else:
            flip = p.lambda1p
        if self.lattice.periodic:
            from_left = np.roll(v[:, 0], 1)
            from_right = np.roll(v[:, 1], -1)
        else:
            from_left = np.concatenate(([0], v[:-1, 0]))
            from_right = np.concatenate((v[1:, 1], [0]))
        out[:, 0] = right * from_left - flip * v[:, 1]
        out[:, 1] = flip * v[:, 0] + left * from_right
        return out.reshape(-1)


def _dense_variant(op: FloquetOperator) -> np.ndarray:
    p, lat = op.params, op.lattice
    if op.variant is Variant.STANDARD:
        return build_shift(p, lat) @ build_coin(p, lat)
    if op.variant is Variant.LOSSY_REALIZED:
        return np.exp(-2 * np.pi * p.eta) * (build_shift(p, lat) @ build_coin(p, lat))
    if op.variant is Variant.SYMMETRIZED:
        lattice_coins = coins_at(lat.positions, _regular(p))
        lat.check_flux(p)
        half = block_diag(np.array([coin_sqrt(c) for c in lattice_coins]))
        return half @ build_shift(p, lat) @ half
    if op.variant is Variant.DUAL:
        swapped = p.with_(lambda1=p.lambda2, lambda2=p.lambda1)
        if op.meta.get("dual_mode", "complexified") == "mechanical":
            return (build_shift(swapped, lat) @ build_coin(swapped, lat)).T
        # theta -> theta - i eta on the swapped walk, eta removed from the shift
        return (build_shift(swapped, lat, eta=0.0) @ build_coin(swapped, lat, theta=p.theta - 1j * p.eta)).T
    raise ModelError(f"unknown variant {op.variant}")


def _regular(p: ModelParams) -> ModelParams:
    # lambda2' = 0 makes the coin a pure rotation that can hit eigenvalue -1 twice
    if p.lambda2p == 0.0:
        return p.with_(lambda2=1.0 - 1e-12)
    return p


def build_floquet(params: ModelParams, lattice: Lattice, variant: Variant = Variant.STANDARD,
                  dual_mode: str = "complexified") -> FloquetOperator:
    lattice.check_flux(params)
    meta = {}
    if variant is Variant.DUAL:
        if dual_mode not in ("complexified", "mechanical"):
            raise ModelError(f"unknown dual mode {dual_mode!r}")
        meta["dual_mode"] = dual_mode
        if params.eta != 0.0:
            meta["warning"] = "dual for eta != 0 is a modeling extension"
    return FloquetOperator(params, lattice, variant, meta)


def skin_transform(state: np.ndarray, eta: float, lattice: Lattice, inverse: bool = False) -> np.ndarray:
    """Multiply the amplitudes at site x by exp(2 pi eta x) (exp(-2 pi eta x) for the inverse).

    With this V_eta, W_eta = V_eta W_0 V_eta^{-1} on an open chain.
    """
    if lattice.periodic:
        raise ModelError("skin transform needs an open chain")
    x = lattice.positions
    if np.max(np.abs(2 * np.pi * eta * x), initial=0.0) > 700:
        raise ModelError("skin transform would overflow (|2 pi eta x| > 700)")
    g = np.exp((-1 if inverse else 1) * 2 * np.pi * eta * x)
    return np.asarray(state) * np.repeat(g, 2)


def skin_matrix(eta: float, lattice: Lattice) -> np.ndarray:
    return np.diag(skin_transform(np.ones(lattice.dim), eta, lattice))


def pt_operator(lattice: Lattice) -> np.ndarray:
    """Linear part U of PT = U K: inversion x -> -x combined with sigma_z on the spin."""
    n = lattice.size
    if lattice.periodic:
        target = (-lattice.positions) % n
    else:
        if lattice.origin != n - 1 - lattice.origin:
            raise ModelError("PT check needs an open window symmetric about the origin")
        target = -lattice.positions + lattice.origin
    u = np.zeros((2 * n, 2 * n))
    i = np.arange(n)
    u[2 * target, 2 * i] = 1.0
    u[2 * target + 1, 2 * i + 1] = -1.0
    return u


def verify_pt_symmetry(params: ModelParams, lattice: Lattice) -> dict:
    """Max deviation of (PT) W~ (PT)^{-1} from W~^{-1}."""
    u = pt_operator(lattice)
    w = build_floquet(params, lattice, Variant.SYMMETRIZED).matrix()
    lhs = u @ w.conj() @ u.T
    rhs = np.linalg.inv(w)
    return dict(deviation=float(np.max(np.abs(lhs - rhs))), theta=params.theta, eta=params.eta)


def localized_state(lattice: Lattice, x: int = 0, spinor=(1 / math.sqrt(2), 1j / math.sqrt(2))) -> np.ndarray:
    """|x> (x) spinor; default spinor (|H> + i|V>)/sqrt(2)."""
    psi = np.zeros(lattice.dim, dtype=complex)
    i = lattice.index(x)
    psi[2 * i], psi[2 * i + 1] = spinor
    return psi
