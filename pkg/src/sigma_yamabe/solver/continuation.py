"""自然参数延拓

沿 t 前进: 割线预测, Newton 校正; 失败时步长减半, 迭代次数少时放大。
每个接受的步记录先验量监视; 相对起点或上一步增长过快时标记。
"""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Mapping, Optional

import numpy as np
import pandas as pd

from sigma_yamabe.config import config
from sigma_yamabe.errors import (
    ConeGuardError,
    ConeViolationError,
    ContinuationStuckError,
    DomainError,
    LineSearchError,
    NewtonMaxIterError,
    SingularJacobianError,
)
from sigma_yamabe.solver.diagnostics import monitors
from sigma_yamabe.solver.newton import SolveReport, newton_solve
from sigma_yamabe.solver.problem import (
    PATHS,
    ContinuationState,
    PathSpec,
    RadialProblem,
    theta_selection,
)
from sigma_yamabe.utils.logger import get_logger

logger = get_logger(__name__)

RECOVERABLE = (ConeViolationError, NewtonMaxIterError, LineSearchError, ConeGuardError,
               SingularJacobianError)


@dataclass
class ContinuationStep:
    """一个接受的延拓步"""

    t: float
    dt: float
    iterations: int
    residual: float
    cone_margin: float
    monitors: Dict[str, float]
    growth: float = 1.0
    flagged: bool = False

    def to_dict(self) -> Dict[str, Any]:
        return {'t': self.t, 'dt': self.dt, 'iterations': self.iterations,
                'residual': self.residual, 'cone_margin': self.cone_margin,
                'growth': self.growth, 'flagged': self.flagged, **self.monitors}


@dataclass
class ContinuationResult:
    """延拓结果: 每个接受点的 SolveReport 与步记录(第一个为起点的热启动)"""

    problem: RadialProblem
    path: PathSpec
    reports: List[SolveReport] = field(default_factory=list)
    steps: List[ContinuationStep] = field(default_factory=list)
    rejected: int = 0

    @property
    def final(self) -> SolveReport:
        return self.reports[-1]

    @property
    def completed(self) -> bool:
        return bool(self.reports) and self.reports[-1].t >= self.path.t_end

    @property
    def min_cone_margin(self) -> float:
        return float(min(report.cone_margin for report in self.reports))

    @property
    def flagged(self) -> bool:
        return any(step.flagged for step in self.steps)

    def trace_frame(self) -> pd.DataFrame:
        """t, r, u, residual, cone_margin 逐节点的轨迹表。"""
        frames = [pd.DataFrame({'t': report.t, 'r': report.r, 'u': report.u,
                                'residual': report.node_residual,
                                'cone_margin': report.node_margin})
                  for report in self.reports]
        return pd.concat(frames, ignore_index=True)

    def step_frame(self) -> pd.DataFrame:
        return pd.DataFrame([step.to_dict() for step in self.steps])

    def to_dict(self) -> Dict[str, Any]:
        return {'problem': self.problem.to_dict(), 'path': self.path.kind,
                'theta': self.path.theta, 'completed': self.completed,
                'rejected': self.rejected, 'min_cone_margin': self.min_cone_margin,
                'flagged': self.flagged, 'steps': [step.to_dict() for step in self.steps],
                'final': {'t': self.final.t, 'iterations': self.final.iterations,
                          'residual': self.final.residual,
                          'diagnostics': {key: value for key, value
                                          in self.final.diagnostics.items()
                                          if key != 'sigma_k_hat'}}}


def make_path(problem: RadialProblem, kind: str, theta: Optional[float] = None) -> PathSpec:
    """路径描述; pos / lcf / fixed 缺省由 theta_selection 选 Θ。"""
    if kind not in PATHS:
        raise DomainError(f"未知的路径 {kind!r}, 可选 {PATHS}")
    if kind == 'defm':
        return PathSpec('defm')
    if theta is None:
        theta = theta_selection(problem, 'lcf' if kind == 'lcf' else 'pos')
    return PathSpec(kind, float(theta))


def _scale(value: float) -> float:
    return max(abs(value), 1.0)


def growing_monitors(values: Mapping[str, float], start: Mapping[str, float],
                     previous: Mapping[str, float], limit: float,
                     step_limit: float) -> List[str]:
    """增长过快的监视量

    量级取 max(|v|, 1)。相对起点的倍数超过 limit, 或一个接受步内的倍数
    超过 step_limit, 或取值非有限时记入结果。
    """
    growing = []
    for key, value in values.items():
        if not np.isfinite(value):
            growing.append(key)
            continue
        scale = _scale(value)
        if (scale > limit * _scale(start.get(key, 0.0))
                or scale > step_limit * _scale(previous.get(key, 0.0))):
            growing.append(key)
    return growing


def _record(result: ContinuationResult, problem: RadialProblem, state: ContinuationState,
            report: SolveReport, dt: float, limit: float, step_limit: float) -> None:
    values = monitors(problem, state)
    start = result.steps[0].monitors if result.steps else values
    previous = result.steps[-1].monitors if result.steps else values
    growing = growing_monitors(values, start, previous, limit, step_limit)
    growth = max((_scale(v) / _scale(start.get(key, 0.0)) for key, v in values.items()
                  if np.isfinite(v)), default=1.0)
    if growing:
        logger.warning(f"t={report.t:g}: 先验量增长过快 {growing}: {values}")
    result.reports.append(report)
    result.steps.append(ContinuationStep(t=report.t, dt=dt, iterations=report.iterations,
                                         residual=report.residual,
                                         cone_margin=report.cone_margin, monitors=values,
                                         growth=float(growth), flagged=bool(growing)))


def run_continuation(problem: RadialProblem, kind: str = 'pos',
                     initial_step: Optional[float] = None, theta: Optional[float] = None,
                     max_steps: int = 10000) -> ContinuationResult:
    """从已知解出发沿路径走到 t = 1

    Args:
        problem: 径向问题
        kind: 'pos', 'lcf', 'defm' 或 'fixed'
        initial_step: 初始步长, 缺省取配置 solver.initial_step
        theta: 固定 Θ, 缺省自动选择
        max_steps: 起点之后接受步数的上限

    Returns:
        ContinuationResult

    Raises:
        ContinuationStuckError: 步长低于 solver.step_underflow, 或接受 max_steps 步后
            仍未到达 t = 1; 携带最后的 t 与已有报告
    """
    path = make_path(problem, kind, theta)
    dt = float(config.get('solver.initial_step', 0.25) if initial_step is None else initial_step)
    underflow = float(config.get('solver.step_underflow', 1e-6))
    growth = float(config.get('solver.growth', 1.5))
    easy = int(config.get('solver.easy_iterations', 3))
    limit = float(config.get('solver.monitor_growth_limit', 1e3))
    step_limit = float(config.get('solver.monitor_step_growth', 10.0))

    result = ContinuationResult(problem=problem, path=path)
    state = ContinuationState.start(problem, path)
    # 离散的 A 下 u ≡ 0 只近似满足起点方程, 先做一次校正
    report = newton_solve(problem, state)
    state = state.with_values(report.U)
    _record(result, problem, state, report, 0.0, limit, step_limit)
    logger.info(f"{kind} 路径: 起点 t={path.t_start:g} 校正 {report.iterations} 次")

    previous = None
    while state.t < path.t_end:
        if len(result.steps) > max_steps:
            raise ContinuationStuckError(
                f"{kind} 路径接受 {max_steps} 步后停在 t={state.t:g}",
                last_t=float(state.t), reports=result.reports)
        step = min(dt, path.t_end - state.t)
        t_new = path.t_end if step >= path.t_end - state.t else state.t + step
        guess = state.U
        if previous is not None:
            guess = state.U + (step / (state.t - previous.t)) * (state.U - previous.U)
        try:
            report = newton_solve(problem, ContinuationState(t=t_new, path=path, U=guess))
        except RECOVERABLE as exc:
            result.rejected += 1
            dt = 0.5 * step
            logger.info(f"t={t_new:g} 失败({type(exc).__name__}), 步长减为 {dt:.3e}")
            if dt < underflow:
                raise ContinuationStuckError(
                    f"{kind} 路径在 t={state.t:g} 处步长低于 {underflow:g}",
                    last_t=float(state.t), reports=result.reports) from exc
            continue
        previous = state
        state = ContinuationState(t=t_new, path=path, U=report.U, history=tuple(report.history),
                                  cone_margin=report.cone_margin)
        _record(result, problem, state, report, step, limit, step_limit)
        logger.info(f"t={t_new:.6g}: {report.iterations} 次迭代, 锥边距 {report.cone_margin:.4g}")
        dt = step * growth if report.iterations <= easy else step
    logger.info(f"{kind} 路径结束: {len(result.steps) - 1} 步, 拒绝 {result.rejected} 次")
    return result
