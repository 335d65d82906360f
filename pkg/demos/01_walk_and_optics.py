# The walk W = S Q and its optical realization.
# Builds the coin and shift from wave plates and beam displacers, then runs
# the lossy walk that the optical table actually implements and recovers P(t).
import numpy as np

from uamo_lab import Lattice, ModelParams, build_floquet, localized_state
from uamo_lab import optics
from uamo_lab.dynamics import evolve

p = ModelParams(0.5, 0.25, theta=0.0, eta=0.05)
lat = Lattice.open(31)

# coin: q(phi3) h(phi2) q(phi1) per site
worst = max(optics.coin_decomposition(x, p)[1] for x in range(-15, 16))
print("coin decomposition, max residual over 31 sites:", worst)

# shift: two beam displacers, two half-wave plates, two loss elements
_, r = optics.shift_decomposition(p, lat)
print("shift decomposition residual:", r)

# the table only removes light; the gain is put back by bookkeeping
psi0 = localized_state(lat)
states, records = optics.simulate_lossy_walk(psi0, p, lat, 6)
for rec in records:
    print(f"t={rec.t}  surviving={rec.surviving:.4f}  lost this step={rec.lost:.4f}")

P_rec = optics.reconstruct_overall_probability(records, p.eta)
P_ideal = [np.vdot(s, s).real for s in evolve(psi0, build_floquet(p, lat), 6)]
print("P(t) from loss records :", np.round(P_rec, 4))
print("P(t) from ideal walk   :", np.round(P_ideal, 4))
