# Spectral winding number through the complexified dual walk.
# Base points on the unit circle; points inside the eta=0 spectrum are skipped.
from uamo_lab import Lattice, ModelParams, fibonacci_ring
from uamo_lab.spectral import winding_profile, winding_regime

lat = Lattice.ring(89)
base = ModelParams(0.25, 0.5, 0.0, 0.0, fibonacci_ring(89))
for eta in (0.05, 0.2, 0.4, -0.2):
    prof = winding_profile(base.with_(eta=eta), lat, z_count=32, M=256)
    vals = "".join("." if not r.valid else "0+-"[r.nu_hat] for r in prof)
    print(f"eta={eta:+.2f}  {winding_regime(prof):6s}  {vals}")
