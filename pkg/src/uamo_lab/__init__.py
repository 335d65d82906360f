"""Simulation and spectral analysis of the unitary almost-Mathieu quantum walk and its non-Hermitian extension."""
from .model import (GOLDEN, Boundary, FloquetOperator, Lattice, ModelError, ModelParams, Variant,
                    build_coin, build_floquet, build_shift, coin_at, coin_sqrt, fibonacci_approximant,
                    fibonacci_ring, localized_state, skin_transform, verify_pt_symmetry)
from .analytics import critical_points, dual_lyapunov, localization_boundary
from .spectral import Phase, classify_pt_phase, eigendecompose, spectrum, winding_number, winding_profile

__version__ = "0.1.0"
