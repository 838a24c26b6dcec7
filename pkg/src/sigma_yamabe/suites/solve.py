"""求解器套件

半球面常数解回归, 人造径向解的二阶收敛, 最大值点诊断,
以及沿选定形变路径从起点延拓到 t = 1。
"""

from numbers import Real
from typing import Any, Dict, List, Optional

import numpy as np

from sigma_yamabe.config import config
from sigma_yamabe.errors import (
    ConeGuardError,
    ConeViolationError,
    ConfigError,
    ContinuationStuckError,
    DomainError,
    LineSearchError,
    NewtonMaxIterError,
    SingularJacobianError,
)
from sigma_yamabe.geom import ConformalExponent
from sigma_yamabe.solver import (
    ContinuationResult,
    ContinuationState,
    RadialProblem,
    extremal_diagnostics,
    hemisphere_constant_solution,
    manufactured_problem,
    newton_solve,
    path_constant_solution,
    problem_from_config,
    run_continuation,
)
from sigma_yamabe.suites.base import (
    BaseSuite,
    CheckTask,
    SuiteResult,
    check_row,
    refinement_row,
)
from sigma_yamabe.utils.logger import get_logger

logger = get_logger(__name__)

MANUFACTURED = ConformalExponent.polynomial([0.0, 0.1, -0.05])
MANUFACTURED_NODES = (51, 101)

ERROR_REFS = {
    'constant_regression': 'sigma_k^{1/k}(A_u) = f e^{2u} on the round hemisphere',
    'extremal_diagnostics': 'maximum principle at the extremal point',
    'manufactured_convergence': 'second-order radial discretization',
}


class SolveSuite(BaseSuite):
    """求解器套件"""

    name = 'solve'
    recoverable = (ConeViolationError, DomainError, NewtonMaxIterError, LineSearchError,
                   ConeGuardError, SingularJacobianError, ContinuationStuckError)

    def __init__(self, settings=None):
        super().__init__(settings)
        self.continuation: Optional[ContinuationResult] = None

    @property
    def path_check(self) -> str:
        return f'continuation[{self.settings.path}]'

    @property
    def target_c(self) -> float:
        return float(config.get('solver.target_c', 2.0))

    @property
    def tolerance(self) -> float:
        return float(config.get('solver.regression_tolerance', 1e-8))

    def problem(self) -> RadialProblem:
        return problem_from_config({'n': self.settings.n, 'k': self.settings.k, 'w': 'round',
                                    'target': {'name': 'exp_minus', 'c': self.target_c},
                                    'name': 'hemisphere'}, nodes=self.settings.nodes)

    def start(self) -> Any:
        """回归的初值: 常数或共形指数配置。"""
        start = config.get('solver.start', 0.3)
        if isinstance(start, Real):
            return float(start)
        return ConformalExponent.from_config(start, self.settings.n)

    def error_ref(self, check: str) -> str:
        if check == self.path_check:
            return f'continuation along the {self.settings.path} path'
        return ERROR_REFS.get(check, '')

    def constant_regression(self) -> Dict[str, Any]:
        """从 solver.start 出发收敛到 u* = −½ln(σ_k^{1/k}(½e)/c)。"""
        problem = self.problem()
        report = newton_solve(problem, ContinuationState.start(problem, u0=self.start()))
        u_star = hemisphere_constant_solution(self.settings.n, self.settings.k, self.target_c)
        error = float(np.max(np.abs(report.u - u_star)))
        return check_row(error, self.tolerance, ERROR_REFS['constant_regression'],
                         u_star=u_star, iterations=report.iterations,
                         observed_order=report.observed_order, history=report.history,
                         cone_margin=report.cone_margin)

    def extremal(self) -> Dict[str, Any]:
        problem = self.problem()
        u_star = hemisphere_constant_solution(self.settings.n, self.settings.k, self.target_c)
        report = newton_solve(problem, ContinuationState.start(problem, u0=u_star))
        info = extremal_diagnostics(problem, report)
        holds = info['constant'] and info['max_principle_holds'] and info['sigma_chain_holds']
        return dict(passed=bool(holds), residual=info['gap'], tolerance=1e-8,
                    paper_ref=ERROR_REFS['extremal_diagnostics'], **info)

    def manufactured(self) -> Dict[str, Any]:
        """人造解 u = 0.1r − 0.05r² 在两级节点上的最大误差按二阶下降。"""
        errors = []
        for nodes in MANUFACTURED_NODES:
            problem = manufactured_problem(self.settings.n, self.settings.k,
                                           ConformalExponent.round(), MANUFACTURED, nodes=nodes)
            report = newton_solve(problem, ContinuationState.start(problem))
            exact = MANUFACTURED.radial_values(problem.r)[0]
            errors.append(float(np.max(np.abs(report.u - exact))))
        return refinement_row(errors[0], errors[1], 1e-3, ERROR_REFS['manufactured_convergence'],
                              ratio=3.0, nodes=list(MANUFACTURED_NODES))

    def expected_final(self, result: ContinuationResult) -> float:
        n, k, kind = self.settings.n, self.settings.k, self.settings.path
        if kind == 'defm':
            return hemisphere_constant_solution(n, k, self.target_c)
        if kind == 'fixed':
            return 0.0
        return path_constant_solution(n, k, kind, 1.0, result.path.theta)

    def path(self) -> Dict[str, Any]:
        """走到 t = 1, 全程锥边距为正, 先验量不超过增长上限。"""
        result = run_continuation(self.problem(), self.settings.path)
        self.continuation = result
        expected = self.expected_final(result)
        error = float(np.max(np.abs(result.final.u - expected)))
        passed = (result.completed and result.min_cone_margin > 0.0 and not result.flagged
                  and error <= self.tolerance)
        return dict(passed=passed, residual=error, tolerance=self.tolerance,
                    paper_ref=self.error_ref(self.path_check), theta=result.path.theta,
                    steps=len(result.steps) - 1, rejected=result.rejected,
                    min_cone_margin=result.min_cone_margin, flagged=result.flagged,
                    expected=expected)

    def tasks(self) -> List[CheckTask]:
        return [
            ('constant_regression', self.constant_regression),
            ('extremal_diagnostics', self.extremal),
            ('manufactured_convergence', self.manufactured),
            (self.path_check, self.path),
        ]

    def run(self) -> SuiteResult:
        n, k = self.settings.n, self.settings.k
        if self.settings.path == 'defm' and (n, k) != (4, 2):
            raise ConfigError(f"defm 路径只对 n = 4, k = 2 定义, 得到 n={n}, k={k}")
        if self.settings.path == 'lcf' and k < 2:
            raise ConfigError("lcf 路径需要 k >= 2")
        ledger = self.new_ledger()
        self.run_checks(ledger, self.tasks())
        tables = {}
        if self.continuation is not None:
            tables['continuation_trace'] = self.continuation.trace_frame()
            tables['continuation_steps'] = self.continuation.step_frame()
            logger.info(f"{self.settings.path} 路径: {len(self.continuation.steps) - 1} 步, "
                        f"最小锥边距 {self.continuation.min_cone_margin:.4g}")
        return SuiteResult(ledger, tables, {'n': n, 'k': k, 'path': self.settings.path,
                                            'nodes': self.settings.nodes})
