# Spectra on the 89-site Fibonacci ring for (lambda1, lambda2) = (0.25, 0.5).
# Below eta_PT the spectrum stays on the unit circle, then it leaves it.
import numpy as np

from uamo_lab import ModelParams, critical_points, fibonacci_ring, spectrum
from uamo_lab.spectral import find_no_loss_states

cp = critical_points(0.25, 0.5)
print(f"closed forms: eta_PT={cp.eta_pt:.4f}  eta0={cp.eta0:.4f}")

base = ModelParams(0.25, 0.5, 0.0, 0.0, fibonacci_ring(89))
for eta in [0.0, 0.05, 0.1, 0.135, 0.2, 0.335, 0.4]:
    s = spectrum(base.with_(eta=eta), 89, vectors=True)
    r = s.phase
    nl = find_no_loss_states(s)
    print(f"eta={eta:5.3f}  {r.phase.value:12s}  max||z|-1|={r.max_unit_deviation:.2e}  "
          f"min|ln|z||={r.min_log_modulus:.2e}  no-loss states={len(nl)}")

# the ring is small: between the transitions the closest-to-circle states miss it by ~c/N
for n in (89, 233, 377):
    s = spectrum(ModelParams(0.25, 0.5, 0.0, 0.135, fibonacci_ring(n)), n)
    print(f"N={n}: min|ln|z|| = {np.abs(np.log(np.abs(s.z))).min():.2e}")
