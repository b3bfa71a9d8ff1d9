"""Attenuated conical Radon transform: forward operators, range tests, inversion."""
from .errors import (AlignmentError, BoundaryContaminationError, CRTFFormatError, DomainError,
                     GeometryError, SingularityError, StencilError, SymmetryError)
from .fields import (GridSpec, ScalarField, SpectralField, SupportBox, crop, dft_forward,
                     dft_inverse, norms, pad, rel_l2, support_box)
from .inversion import (ReconstructionResult, cumulative_weighted_integral, invert_A_even,
                        invert_A_odd, invert_C_even, invert_C_odd)
from .phantoms import Bump, PhantomSpec, evaluate, sample
from .pipeline import check_phantom_range, forward, roundtrip
from .rangeops import (L_apply_fd, L_apply_spectral, RangeReport, RangeTolerances,
                       check_range_A_even, check_range_A_odd, check_range_C_even,
                       check_range_C_odd, moment_residual)
from .threads import get_threads, set_threads
from .transforms import (ConeQuadratureSpec, TransformParams, aux_forward_direct,
                         aux_forward_spectral, cone_forward_direct, cone_forward_spectral,
                         multiplier_A, multiplier_C)

__version__ = "0.1.0"
