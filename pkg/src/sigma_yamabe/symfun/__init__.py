"""
Elementary symmetric functions, Newton tensors, mixed functions and Gårding cones.
"""

from sigma_yamabe.symfun.functions import (
    spectrum_sigmas,
    matrix_sigmas,
    faddeev_leverrier,
    sigma_k,
    newton_tensor,
    sigma_derivative,
    sigma_and_gradient,
    sigma_hessian,
)
from sigma_yamabe.symfun.mixed import mixed_sigma, mixed_sigmas, mixed_newton, mixed_newtons
from sigma_yamabe.symfun.kronecker import (
    sigma_k_kronecker,
    mixed_sigma_kronecker,
    mixed_newton_kronecker,
    newton_tensor_kronecker,
    levi_civita,
)
from sigma_yamabe.symfun.cone import (
    cone_membership,
    cone_mask,
    cone_margin,
    newton_maclaurin_margins,
    gamma_t_shift,
    gamma_t_membership,
    F_normalized,
    normalized_operator,
    normalized_hessian,
    sample_cone,
    check_structure_conditions,
)

__all__ = [
    'spectrum_sigmas', 'matrix_sigmas', 'faddeev_leverrier', 'sigma_k', 'newton_tensor',
    'sigma_derivative', 'sigma_and_gradient', 'sigma_hessian',
    'mixed_sigma', 'mixed_sigmas', 'mixed_newton', 'mixed_newtons',
    'sigma_k_kronecker', 'mixed_sigma_kronecker', 'mixed_newton_kronecker',
    'newton_tensor_kronecker', 'levi_civita',
    'cone_membership', 'cone_mask', 'cone_margin', 'newton_maclaurin_margins',
    'gamma_t_shift', 'gamma_t_membership', 'F_normalized', 'normalized_operator',
    'normalized_hessian', 'sample_cone', 'check_structure_conditions',
]
