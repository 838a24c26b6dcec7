"""
Charts, curvature packs and boundary geometry.
"""

from sigma_yamabe.geom.chart import (
    Chart,
    ConformalExponent,
    half_ball_flat,
    ball_conformally_flat,
    hemisphere,
    radial_profile,
    general_grid,
    warped_metric,
    tilted_metric,
    chart_from_config,
)
from sigma_yamabe.geom.stencils import Stencil, fd_weights
from sigma_yamabe.geom.curvature import (
    CurvaturePack,
    build_curvature,
    conformal_schouten,
    conformal_schouten_at,
    kulkarni_nomizu,
    orthonormal_frame,
)
from sigma_yamabe.geom.boundary import (
    BoundarySlice,
    build_boundary,
    check_boundary_identities,
    check_structure_t,
    fermi_christoffels,
    compatible_factor,
    check_normal_derivative_identities,
    check_boundary_bianchi,
)

__all__ = [
    'Chart', 'ConformalExponent', 'half_ball_flat', 'ball_conformally_flat', 'hemisphere',
    'radial_profile', 'general_grid', 'warped_metric', 'tilted_metric', 'chart_from_config',
    'Stencil', 'fd_weights',
    'CurvaturePack', 'build_curvature', 'conformal_schouten', 'conformal_schouten_at', 'kulkarni_nomizu',
    'orthonormal_frame',
    'BoundarySlice', 'build_boundary', 'check_boundary_identities', 'check_structure_t',
    'fermi_christoffels', 'compatible_factor', 'check_normal_derivative_identities',
    'check_boundary_bianchi',
]
