# Closed forms: critical couplings, dual Lyapunov exponent, localization boundary,
# and the Hatano-Nelson comparison model checked against its transfer matrix.
import numpy as np

from uamo_lab import analytics
from uamo_lab.analytics import HatanoNelsonParams
from uamo_lab.model import Lattice

for l1, l2 in [(0.25, 0.5), (0.5, 0.5), (0.5, 0.25)]:
    print((l1, l2), analytics.critical_points(l1, l2).to_dict())

print("\nL# along eta at (0.25, 0.5)")
for eta in np.linspace(0, 0.4, 9):
    print(f"  eta={eta:.2f}  L#={analytics.dual_lyapunov(0.25, 0.5, eta):.4f}")

print("\nlocalization boundary lambda2*(lambda1) at eta=0.1")
for l1 in np.linspace(0.1, 0.9, 9):
    print(f"  lambda1={l1:.1f}  lambda2*={analytics.localization_boundary(l1, 0.1):.4f}")

lam, eta = 1.5, 0.05
h = analytics.hatano_nelson_matrix(HatanoNelsonParams(lam, eta, phi=144 / 233), Lattice.ring(233))
E = float(np.sort(np.linalg.eigvals(h).real)[100])
num = analytics.transfer_matrix_lyapunov_hn(HatanoNelsonParams(lam, eta), E)
print(f"\nHatano-Nelson at E={E:.3f}: transfer matrix {num:.5f}, closed form {analytics.hatano_nelson_lyapunov(lam, eta):.5f}")
