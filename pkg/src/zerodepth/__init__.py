"""Numerical asymptotics of weighted outer functions.

Log-weights φ, their Poisson profiles ``q(y) = log|W(iy)|``, the upper
Legendre transform ``Q(s)``, Laplace and Fourier oracles, and the
depth-of-zero / polynomial-distance / majorant pipelines built on them.
"""
__version__ = "0.1.0"

from .errors import (CapabilityError, ConditionError, ConsistencyError, ConvergenceError,  # noqa: E402
                     DataFormatError, DomainError, EvaluationError, OutOfRangeError,
                     PrecisionError, RefusalError, ZeroDepthError)
from .quadrature import QuadratureConfig  # noqa: E402
from .weights import (DCSequence, Majorant, PowerWeight, SyntheticWeight, TableWeight,  # noqa: E402
                      check_conditions, eval_weight, lower_legendre_phi, majorant_weight,
                      ostrowski_phi, sequence_weight)
from .poisson import QProfile, SyntheticProfile, profile_for  # noqa: E402
from .legendre import legendre_point, legendre_point_star, sweep  # noqa: E402
from .laplace import LogMagnitude, laplace_asymptotic, laplace_oracle  # noqa: E402
from .transforms import ComplexLogW, eval_h, fourier_inverse_oracle, rho_bounds  # noqa: E402
from .applications import depth_of_zero, ls_majorant, poly_distance, taylor_bound  # noqa: E402
