"""带 Armijo 阻尼与锥保护的 Newton 迭代"""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np
import scipy.linalg

from sigma_yamabe.config import config
from sigma_yamabe.errors import (
    ConeGuardError,
    ConeViolationError,
    LineSearchError,
    NewtonMaxIterError,
    SingularJacobianError,
)
from sigma_yamabe.models.base_model import BaseModel
from sigma_yamabe.solver.diagnostics import solution_diagnostics
from sigma_yamabe.solver.problem import ContinuationState, RadialProblem, evaluate
from sigma_yamabe.utils.logger import get_logger

logger = get_logger(__name__)

SINGULAR_CONDITION = 1e14


@dataclass(eq=False, repr=False)
class SolveReport(BaseModel):
    """一次 Newton 求解的结果

    Attributes:
        converged: 是否收敛
        t: 路径参数
        path: 路径名
        r: 节点
        U: 带虚节点的解
        iterations: Newton 迭代次数
        history: 各次迭代的残差 ∞-范数
        observed_order: 由残差尾部估计的收敛阶
        node_residual: 各节点方程的残差
        node_margin: 各节点的锥边距
        diagnostics: ĝ 的诊断量
    """

    converged: bool
    t: float
    path: str
    r: np.ndarray
    U: np.ndarray
    iterations: int
    history: List[float]
    observed_order: float
    node_residual: np.ndarray
    node_margin: np.ndarray
    diagnostics: Dict[str, Any] = field(default_factory=dict)

    @property
    def u(self) -> np.ndarray:
        return self.U[1:-1]

    @property
    def residual(self) -> float:
        return float(self.history[-1])

    @property
    def cone_margin(self) -> float:
        return float(np.min(self.node_margin))

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'SolveReport':
        return cls(converged=bool(data['converged']), t=float(data['t']), path=data['path'],
                   r=np.asarray(data['r'], dtype=float), U=np.asarray(data['U'], dtype=float),
                   iterations=int(data['iterations']), history=list(data['history']),
                   observed_order=float(data['observed_order']),
                   node_residual=np.asarray(data['node_residual'], dtype=float),
                   node_margin=np.asarray(data['node_margin'], dtype=float),
                   diagnostics=dict(data.get('diagnostics', {})))

    def to_dict(self) -> Dict[str, Any]:
        return {'converged': self.converged, 't': self.t, 'path': self.path,
                'r': self.r.tolist(), 'U': self.U.tolist(), 'iterations': self.iterations,
                'history': [float(h) for h in self.history],
                'observed_order': self.observed_order,
                'node_residual': self.node_residual.tolist(),
                'node_margin': self.node_margin.tolist(), 'diagnostics': self.diagnostics}


def observed_order(history: List[float], floor: float = 1e-13) -> float:
    """由最后三个高于舍入水平的残差估计 p: e_{j+1} ≈ C e_j^p。"""
    tail = [e for e in history if e > floor]
    if len(tail) < 3:
        return float('nan')
    e0, e1, e2 = tail[-3:]
    if e1 >= e0 or e2 >= e1:
        return float('nan')
    return float(np.log(e2 / e1) / np.log(e1 / e0))


def _direction(J: np.ndarray, R: np.ndarray) -> np.ndarray:
    condition = float(np.linalg.cond(J))
    if not np.isfinite(condition) or condition > SINGULAR_CONDITION:
        raise SingularJacobianError(f"线性化算子奇异, 条件数 {condition:.3e}",
                                    condition=condition)
    return scipy.linalg.solve(J, -R)


def newton_solve(problem: RadialProblem, state: ContinuationState,
                 tol: Optional[float] = None, max_iter: Optional[int] = None) -> SolveReport:
    """阻尼 Newton 法

    Args:
        problem: 径向问题
        state: 初值与路径参数
        tol: 残差 ∞-范数容差, 缺省取配置 solver.tol
        max_iter: 最大迭代次数, 缺省取配置 solver.max_iter

    Returns:
        SolveReport: 收敛的结果

    Raises:
        ConeViolationError: 初值的谱不在锥内(不做截断)
        NewtonMaxIterError: 超过迭代上限
        LineSearchError: Armijo 步长低于下限
        ConeGuardError: 所有阻尼步都离开锥
        SingularJacobianError: Jacobian 奇异
    """
    tol = float(config.get('solver.tol', 1e-10) if tol is None else tol)
    max_iter = int(config.get('solver.max_iter', 30) if max_iter is None else max_iter)
    armijo = float(config.get('solver.armijo', 1e-4))
    min_step = float(config.get('solver.min_step', 2.0 ** -20))

    current = evaluate(problem, state, jacobian=True)
    U = np.asarray(state.U, dtype=float)
    history = [float(np.max(np.abs(current.residual)))]
    iterations = 0
    while history[-1] > tol:
        if iterations >= max_iter:
            raise NewtonMaxIterError(f"t={state.t:g}: {max_iter} 次迭代后残差 {history[-1]:.3e}",
                                     history=history)
        delta = _direction(current.jacobian, current.residual)
        norm2 = float(np.linalg.norm(current.residual))
        alpha, trials, cone_rejects = 1.0, 0, 0
        while True:
            if alpha < min_step:
                error = ConeGuardError if cone_rejects == trials else LineSearchError
                raise error(f"t={state.t:g}: 阻尼步长低于 {min_step:.3e}", history=history)
            trials += 1
            try:
                trial = evaluate(problem, state.with_values(U + alpha * delta))
            except ConeViolationError as exc:
                cone_rejects += 1
                logger.debug(f"步长 {alpha:.3e} 离开锥(节点 {exc.node}), 减半")
                alpha *= 0.5
                continue
            if np.linalg.norm(trial.residual) <= (1.0 - armijo * alpha) * norm2:
                break
            logger.debug(f"步长 {alpha:.3e} 未满足 Armijo 条件, 减半")
            alpha *= 0.5
        U = U + alpha * delta
        iterations += 1
        current = evaluate(problem, state.with_values(U), jacobian=True)
        history.append(float(np.max(np.abs(current.residual))))
        logger.debug(f"Newton {iterations}: 残差 {history[-1]:.3e}, 步长 {alpha:g}")

    final = state.with_values(U, history=tuple(history),
                              cone_margin=float(np.min(current.margin)))
    report = SolveReport(converged=True, t=float(state.t), path=state.path.kind, r=problem.r,
                         U=U, iterations=iterations, history=history,
                         observed_order=observed_order(history),
                         node_residual=current.residual[1:-1], node_margin=current.margin,
                         diagnostics=solution_diagnostics(problem, final))
    logger.debug(f"t={state.t:g}: {iterations} 次迭代收敛, 残差 {history[-1]:.3e}")
    return report
