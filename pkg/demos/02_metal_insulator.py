# Ballistic spreading versus localization at eta = 0.
# lambda1 > lambda2 spreads linearly in time, lambda1 < lambda2 stays put.
import numpy as np

from uamo_lab import Lattice, ModelParams, build_floquet, localized_state
from uamo_lab.dynamics import evolve, linear_fit, observables

lat = Lattice.open(128)
for l1, l2 in [(0.67, 0.2), (0.2, 0.67)]:
    states = evolve(localized_state(lat), build_floquet(ModelParams(l1, l2), lat), 50, check_size=False)
    sig = observables(states, lat).sigma
    slope, _, r2 = linear_fit(np.arange(5, 51), sig[5:])
    print(f"({l1}, {l2})  sigma(6)={sig[6]:.3f}  sigma(50)={sig[50]:.3f}  slope={slope:.3f}  R2={r2:.4f}")

# a coarse t=6 phase diagram; the self-dual line lambda1 = lambda2 splits it
from uamo_lab.cli import phase_grid_value

axis = np.linspace(0, 1, 6)
print("\nsigma(t=6), rows lambda1, columns lambda2")
for a in axis:
    print(f"{a:4.2f} " + " ".join(f"{phase_grid_value(a, b, 0.0, 6):5.2f}" for b in axis))
