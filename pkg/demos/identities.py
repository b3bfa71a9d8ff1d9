"""Numerical checks of the sphere and Laplace-Hankel identities behind the symbols."""
from collections import defaultdict

from attcone.special import identity_sweep

worst = defaultdict(float)
for row in identity_sweep():
    worst[row["identity"]] = max(worst[row["identity"]], row["rel_error"])
for name, err in worst.items():
    print(f"{name:18s} worst relative error {err:.1e}")
