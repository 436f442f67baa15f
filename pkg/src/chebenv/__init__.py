"""Fast approximate implicitization of envelopes of rational curve families."""

from .bipoly import BiPoly, degree_trim, diff, eval_poly, mul
from .chebtransform import (ChebCoeffs, ChebGrid, cheb_eval_2d, cheb_points,
                            cheb_transform_2d)
from .envelope import RationalFamily, envelope_function, eval_family, jacobian_det
from .errors import (DegenerateImage, DegenerateTriangle, DenominatorNearZero,
                     DimensionMismatch, EmptyZeroSet, EnvelopeError, NumericalFailure)
from .experiment import (ConvergenceTable, benchmark, convergence_study,
                         max_algebraic_error, subdivision_regions, trace_zero_set)
from .implicitize import (CollocationMatrix, ImplicitApproximation, ImplicitBasisSpec,
                          build_D, implicitize, lambda_degrees, reference_triangle,
                          solve_min, tensor_bernstein_eval, triangular_bernstein_eval,
                          working_bidegree)

__version__ = "0.1.0"
