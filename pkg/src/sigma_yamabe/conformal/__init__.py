"""共形变换、边界曲率项与 F_k 泛函"""

from sigma_yamabe.conformal.boundary_terms import (
    b2_decomposition_residual,
    boundary_B2,
    boundary_Bk,
    boundary_gb4,
    c1,
    c2,
    double_factorial,
    l4_invariant,
    l4_weight_check,
    umbilic_bracket,
    umbilic_closed_B2,
)
from sigma_yamabe.conformal.deformation import (
    DeformedTensor,
    deform,
    deformed_conformal_schouten,
    deformed_tensor,
    sigma2_four_expansion,
    theta_tensor_four,
)
from sigma_yamabe.conformal.functional import (
    FunctionalValue,
    conformal_volume,
    evaluate_functional,
    functional_Fk,
    integrate_boundary_invariant,
    integrate_interior,
    sigma_k_hat,
)
from sigma_yamabe.conformal.gauss_bonnet import (
    GaussBonnetIntegrands,
    euler_characteristic,
    gauss_bonnet_four,
    gauss_bonnet_integrands,
    pfaffian_density,
    q_density_closed,
    q_density_sum,
    sigma_density,
)
from sigma_yamabe.conformal.quadrature import (
    QuadratureOrders,
    QuadratureRule,
    ball_rule,
    box_rule,
    chart_rules,
    half_ball_rule,
    sphere_rule,
)
from sigma_yamabe.conformal.state import (
    BoundaryGeometry,
    ConformalState,
    apply_conformal,
    boundary_geometry,
    constant_field,
    zero_field,
)

__all__ = [
    'BoundaryGeometry', 'ConformalState', 'apply_conformal', 'boundary_geometry',
    'constant_field', 'zero_field',
    'boundary_B2', 'boundary_Bk', 'boundary_gb4', 'l4_invariant', 'l4_weight_check',
    'b2_decomposition_residual', 'umbilic_bracket', 'umbilic_closed_B2',
    'c1', 'c2', 'double_factorial',
    'GaussBonnetIntegrands', 'gauss_bonnet_integrands', 'euler_characteristic',
    'gauss_bonnet_four', 'pfaffian_density', 'sigma_density', 'q_density_sum',
    'q_density_closed',
    'FunctionalValue', 'functional_Fk', 'evaluate_functional', 'conformal_volume',
    'integrate_boundary_invariant', 'integrate_interior', 'sigma_k_hat',
    'DeformedTensor', 'deformed_tensor', 'deformed_conformal_schouten', 'deform',
    'theta_tensor_four', 'sigma2_four_expansion',
    'QuadratureOrders', 'QuadratureRule', 'sphere_rule', 'ball_rule', 'half_ball_rule',
    'box_rule', 'chart_rules',
]
