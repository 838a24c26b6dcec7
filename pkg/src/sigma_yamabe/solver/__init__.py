"""
Radial Newton-continuation solver for the sigma_k Yamabe boundary problem.
"""

from sigma_yamabe.solver.radial import (
    RadialGrid,
    radial_hessian_spectrum,
    radial_spectrum_values,
    sphere_area,
)
from sigma_yamabe.solver.problem import (
    PATHS,
    TARGETS,
    ContinuationState,
    Evaluation,
    PathSpec,
    RadialProblem,
    Target,
    assemble_residual,
    evaluate,
    fd_jacobian,
    hemisphere_constant_solution,
    linearized_operator,
    manufactured_problem,
    path_constant_solution,
    problem_from_config,
    theta_selection,
    zeta,
)
from sigma_yamabe.solver.diagnostics import (
    extremal_diagnostics,
    laplacian,
    monitors,
    solution_diagnostics,
)
from sigma_yamabe.solver.newton import SolveReport, newton_solve, observed_order
from sigma_yamabe.solver.continuation import (
    ContinuationResult,
    ContinuationStep,
    growing_monitors,
    make_path,
    run_continuation,
)

__all__ = [
    'RadialGrid', 'radial_hessian_spectrum', 'radial_spectrum_values', 'sphere_area',
    'PATHS', 'TARGETS', 'ContinuationState', 'Evaluation', 'PathSpec', 'RadialProblem', 'Target',
    'assemble_residual', 'evaluate', 'fd_jacobian', 'hemisphere_constant_solution',
    'linearized_operator', 'manufactured_problem', 'path_constant_solution',
    'problem_from_config', 'theta_selection', 'zeta',
    'extremal_diagnostics', 'laplacian', 'monitors', 'solution_diagnostics',
    'SolveReport', 'newton_solve', 'observed_order',
    'ContinuationResult', 'ContinuationStep', 'growing_monitors', 'make_path',
    'run_continuation',
]
