"""Which fields can be transform data? Range tests on good and bad inputs.

Transform data pass: a power of L squeezes them back to compact support and
their exponential moment vanishes. The raw bump has compact support but a
positive moment; a broad Gaussian is never compactly supported.
"""
import math

import numpy as np

from attcone import GridSpec, PhantomSpec, RangeTolerances, ScalarField, TransformParams, sample
from attcone.pipeline import check_phantom_range, working_spec
from attcone.rangeops import check_range_A_odd, check_range_C_odd


def show(label, rep):
    print(f"{label:34s} passed={rep.passed!s:5s} support_ok={rep.support_ok!s:5s} "
          f"moment={rep.moment_residual:.2e}")


p1 = TransformParams(1.0, math.pi / 4, 1)
grid = GridSpec.from_extent((256, 256), -2.0, 2.0)
bump = PhantomSpec.single(2, radius=0.5)

show("cone data, n=1 (eps 1e-3)", check_phantom_range(bump, p1, grid, eps_support=1e-3))
raw = sample(bump, working_spec(grid, p1))
show("raw bump as data, n=1 (eps 1e-3)", check_range_C_odd(raw, p1, RangeTolerances.around(bump, grid, eps_support=1e-3)))

p3 = TransformParams(2.0, math.pi / 4, 3)
g4 = GridSpec.from_extent((24,) * 4, -2.0, 2.0)
ball = PhantomSpec.single(4, radius=1.5)
show("auxiliary data, n=3", check_phantom_range(ball, p3, g4, theorem="a-odd", eps_support=1e-3))
r2 = sum(m**2 for m in g4.mesh())
gauss = ScalarField(g4, np.broadcast_to(np.exp(-r2 / (2 * 0.4**2)), g4.dims))
small = RangeTolerances.around(PhantomSpec.single(4, radius=0.5), g4)
show("Gaussian as data, n=3", check_range_A_odd(gauss, p3, small))
