"""Boundary growth of reproducing kernels in model spaces of Blaschke products.

Zeros and evaluation points are stored as ``(delta, theta)`` with
``delta = 1 - |z|`` so that points within ``2^-45`` of the circle keep full
relative precision.
"""
from .blaschke import (ComplexValue, KernelEstimate, ZeroSequence, ahern_clark_sum,
                       blaschke_sum, eval_B, frostman_sum, kernel_eval, kernel_norm_sq_exact,
                       kernel_norm_sq_sum)
from .designer import (GrowthSpec, design_from_growth, oricyclic_family, phi_from_sigma,
                       tangential_family)
from .disk_geometry import BoundaryPoint, StolzDomain, pseudo_distance, rho
from .errors import (BHGrowthError, DegenerateError, DomainError, InvalidRuleError,
                     RejectedSpecError)
from .gram import beta_sequence, gram_matrix, unconditionality_diagnostic
from .partition import growth_parameter, two_sided_verify
from .witness import eval_witness, lower_bound_check, thm33_witness

__version__ = "0.1.0"
