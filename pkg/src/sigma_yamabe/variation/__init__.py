"""一阶变分与 Euler-Lagrange 残差的数值验证"""

from sigma_yamabe.variation.first_variation import (
    DEFAULT_STEPS,
    EulerLagrangeResidual,
    VariationReport,
    boundary_invariant,
    covariant_divergence,
    divergence_free_check,
    euler_lagrange_residual,
    first_variation_check,
    local_invariant_variation_check,
    order_estimate,
    richardson,
    volume_variation_check,
)
from sigma_yamabe.variation.perturbations import PERTURBATIONS, Perturbation

__all__ = [
    'DEFAULT_STEPS', 'EulerLagrangeResidual', 'VariationReport', 'Perturbation',
    'PERTURBATIONS', 'boundary_invariant', 'covariant_divergence', 'divergence_free_check',
    'euler_lagrange_residual', 'first_variation_check', 'local_invariant_variation_check',
    'order_estimate', 'richardson', 'volume_variation_check',
]
