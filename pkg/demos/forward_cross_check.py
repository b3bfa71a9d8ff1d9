"""Cone transform of a bump by two independent routes.

The direct route integrates over every cone surface with Gauss-Legendre
panels; the spectral route multiplies the bump's DFT by the closed-form
symbol. On a 256^2 grid they agree to about 1e-6.
"""
import math
import time

from attcone import GridSpec, PhantomSpec, TransformParams, forward, rel_l2

params = TransformParams(mu=1.0, psi=math.pi / 4, n=1)
grid = GridSpec.from_extent((256, 256), -2.0, 2.0)
bump = PhantomSpec.single(2, radius=0.5)

t0 = time.perf_counter()
direct = forward(bump, params, grid, method="direct")
t1 = time.perf_counter()
spectral = forward(bump, params, grid, method="spectral")
t2 = time.perf_counter()

print(f"direct   {t1 - t0:6.2f}s (includes kernel compilation on first use)")
print(f"spectral {t2 - t1:6.2f}s")
print(f"relative L2 difference: {rel_l2(spectral, direct):.3e}")

# the data vanish above the bump: every cone opens upward from its apex
z = grid.axis(1)
col = direct.values[128]
print("column x=0, every 16th sample:")
for j in range(0, 256, 16):
    print(f"  z={z[j]:+.3f}  g={col[j]: .6f}")
