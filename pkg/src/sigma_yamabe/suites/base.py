"""验证套件基础类

定义套件结果和套件的基础类。
"""

from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple, Type, Union

import pandas as pd

from sigma_yamabe.conformal.quadrature import QuadratureOrders
from sigma_yamabe.data.io import DataIO
from sigma_yamabe.models.experiment import ExperimentConfig
from sigma_yamabe.models.ledger import RunLedger
from sigma_yamabe.utils.logger import get_logger

logger = get_logger(__name__)

CheckTask = Tuple[str, Callable[[], Dict[str, Any]]]
Outcome = Union[Dict[str, Any], BaseException]


class SuiteResult:
    """套件结果类

    存储一次套件运行的台账与数值表。
    """

    def __init__(self, ledger: RunLedger, tables: Optional[Dict[str, pd.DataFrame]] = None,
                 metadata: Optional[Dict[str, Any]] = None):
        """初始化套件结果

        Args:
            ledger: 逐项检查的台账
            tables: 名称 -> 数值表, 写出为 CSV
            metadata: 结果元数据, 包含套件名与参数
        """
        self.ledger = ledger
        self.tables = tables or {}
        self.metadata = metadata or {}
        if 'suite' not in self.metadata:
            self.metadata['suite'] = ledger.command

    @property
    def passed(self) -> bool:
        return self.ledger.passed

    def add_table(self, name: str, table: pd.DataFrame) -> 'SuiteResult':
        """添加数值表

        Returns:
            SuiteResult: 返回自身，支持链式调用
        """
        self.tables[name] = table
        return self

    def to_dict(self) -> Dict[str, Any]:
        """将套件结果转换为字典(不含计时)"""
        return {
            'metadata': self.metadata,
            'ledger': self.ledger.to_dict(with_timing=False),
            'tables': sorted(self.tables),
        }

    def save(self, directory: str) -> List[Path]:
        """写出 ledger.json、timing.json 与各数值表

        ledger.json 与 CSV 只依赖配置与种子; 计时单独写入 timing.json。

        Args:
            directory: 输出目录

        Returns:
            List[Path]: 写出的文件
        """
        out = Path(directory)
        written = [DataIO.write_json(self.ledger.to_dict(with_timing=False),
                                     out / 'ledger.json'),
                   DataIO.write_json({'command': self.ledger.command,
                                      'wall_clock': self.ledger.wall_clock},
                                     out / 'timing.json')]
        for name in sorted(self.tables):
            written.append(DataIO.write_table(self.tables[name], out / f'{name}.csv'))
        return written

    def __str__(self) -> str:
        return (f"SuiteResult(suite={self.metadata.get('suite')}, "
                f"passed={self.passed}, rows={len(self.ledger.rows)})")

    def __repr__(self) -> str:
        return self.__str__()


class BaseSuite:
    """套件基类

    所有验证套件的基类，提供参数管理与有序的并发检查。
    """

    name = 'base'
    # 这些异常记为台账中的结构化错误而不是中断套件
    recoverable: Tuple[Type[BaseException], ...] = ()

    def __init__(self, settings: Optional[ExperimentConfig] = None):
        """初始化套件

        Args:
            settings: 命令级配置, 缺省为本套件的默认配置
        """
        self.settings = settings or ExperimentConfig(command=self.name)
        self.parameters: Dict[str, Any] = {}

    def set_parameters(self, **kwargs) -> 'BaseSuite':
        """设置套件参数

        Returns:
            BaseSuite: 返回自身，支持链式调用
        """
        self.parameters.update(kwargs)
        return self

    def new_ledger(self) -> RunLedger:
        config = self.settings.model_dump()
        config.update(self.parameters)
        return RunLedger(command=self.name, config=config)

    def run_checks(self, ledger: RunLedger, tasks: Sequence[CheckTask]) -> List[Dict[str, Any]]:
        """并发执行检查, 按任务顺序写入台账

        每个任务返回 add_check 的关键字参数(passed, residual, tolerance,
        paper_ref 与其他细节)。任务抛出 recoverable 中的异常时写入
        ledger.errors。

        Returns:
            List[Dict[str, Any]]: 写入的行
        """
        workers = max(1, int(self.settings.workers))
        if workers == 1:
            outcomes = [self._attempt(item) for item in tasks]
        else:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                outcomes = list(pool.map(self._attempt, tasks))
        rows = []
        for (check, _), outcome in zip(tasks, outcomes):
            if isinstance(outcome, BaseException):
                logger.error(f"{self.name}: 检查 {check} 出错: {type(outcome).__name__}: "
                             f"{outcome}")
                ledger.add_error(check, outcome, self.error_ref(check))
                continue
            row = ledger.add_check(check, **outcome)
            if not row['passed']:
                logger.warning(f"{self.name}: 检查 {check} 未通过, 残差 {row['residual']}")
            rows.append(row)
        return rows

    def error_ref(self, check: str) -> str:
        """出错检查在台账中的 paper_ref 标签。"""
        return ''

    def _attempt(self, item: CheckTask) -> Outcome:
        try:
            return item[1]()
        except self.recoverable as e:
            return e

    def run(self) -> SuiteResult:
        """执行套件

        这是一个抽象方法，子类必须实现。

        Raises:
            NotImplementedError: 如果子类未实现此方法
        """
        raise NotImplementedError("子类必须实现run方法")

    def execute(self) -> SuiteResult:
        """执行并记录起止"""
        logger.info(f"套件 {self.name} 开始: n={self.settings.n}, k={self.settings.k}, "
                    f"seed={self.settings.seed}")
        result = self.run()
        result.ledger.finish()
        logger.info(f"套件 {self.name} 结束: 通过={result.passed}, "
                    f"{len(result.ledger.rows)} 项, 用时 {result.ledger.wall_clock:.2f}s")
        return result


def check_row(residual: float, tolerance: float, paper_ref: str = '',
              **details: Any) -> Dict[str, Any]:
    """残差不超过容差即通过的一行。"""
    residual = float(residual)
    return dict(passed=bool(residual <= tolerance), residual=residual, tolerance=tolerance,
                paper_ref=paper_ref, **details)


def refinement_row(coarse: float, fine: float, tolerance: float, paper_ref: str = '',
                   ratio: float = 3.5, floor: float = 1e-9, **details: Any) -> Dict[str, Any]:
    """两级加密: 细网格残差 <= 容差且至少按 ratio 倍下降(或已低于 floor)。"""
    coarse, fine = float(coarse), float(fine)
    refines = fine <= max(coarse / ratio, floor)
    return dict(passed=bool(refines and fine <= tolerance), residual=fine, tolerance=tolerance,
                paper_ref=paper_ref, coarse=coarse, fine=fine, **details)


def suite_orders(n: int) -> QuadratureOrders:
    """套件使用的求积阶数: n <= 4 取配置值, 更高维按维数降阶。"""
    if n <= 4:
        return QuadratureOrders.default()
    if n == 5:
        return QuadratureOrders(radial=8, angular=6, azimuth=8, box=9)
    return QuadratureOrders(radial=6, angular=4, azimuth=6, box=9)
