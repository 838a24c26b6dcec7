"""
命令行入口 - σ_k-Yamabe 数值工具
负责解析参数、合并配置、运行验证套件并写出台账与数值表

退出码: 0 全部通过, 1 存在未通过的检查, 2 配置错误, 3 数值失败。
"""

import argparse
import copy
import json
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

from pydantic import ValidationError

from sigma_yamabe import __version__
from sigma_yamabe.config import config
from sigma_yamabe.errors import ConfigError, SigmaYamabeError
from sigma_yamabe.models.experiment import ExperimentConfig
from sigma_yamabe.suites import SUITES, SuiteResult
from sigma_yamabe.utils.logger import get_logger, set_level, set_log_file

logger = get_logger(__name__)

EXIT_OK = 0
EXIT_CHECKS_FAILED = 1
EXIT_CONFIG_ERROR = 2
EXIT_NUMERICAL_FAILURE = 3

# 命令行参数名 -> ExperimentConfig 字段
FIELD_FLAGS = ('chart', 'n', 'k', 'seed', 'samples', 'tol', 'path', 'nodes', 'out',
               'test_mode', 'workers')


def build_parser() -> argparse.ArgumentParser:
    """构造带五个子命令的参数解析器"""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="JSON 配置文件, 按模块分节")
    common.add_argument("--seed", type=int, help="随机种子")
    common.add_argument("--grid", type=int, metavar="N", help="每个方向的网格分辨率")
    common.add_argument("--out", metavar="DIR", help="输出目录")
    common.add_argument("--tol", type=float, help="代数恒等式容差")
    common.add_argument("--chart", help="图册名称")
    common.add_argument("--n", type=int, help="维数")
    common.add_argument("--k", type=int, help="阶数")
    common.add_argument("--samples", type=int, help="随机样本数")
    common.add_argument("--workers", type=int, help="并发工作线程数")
    common.add_argument("--log-level", choices=["DEBUG", "INFO", "WARNING", "ERROR"],
                        help="日志级别")

    parser = argparse.ArgumentParser(prog="sigma-yamabe",
                                     description="σ_k-Yamabe 问题的数值验证与求解")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    identities = sub.add_parser("identities", parents=[common], help="对称函数恒等式套件")
    identities.add_argument("--test-mode", choices=["broken-coefficient"],
                            help="注入错误的 Newton 张量系数")
    sub.add_parser("curvature", parents=[common], help="曲率与边界几何套件")
    sub.add_parser("gaussbonnet", parents=[common], help="Gauss-Bonnet 与 F_k 套件")
    sub.add_parser("variation", parents=[common], help="变分结构套件")
    solve = sub.add_parser("solve", parents=[common], help="Newton 延拓求解")
    solve.add_argument("--path", choices=["pos", "lcf", "defm", "fixed"], help="延拓路径")
    solve.add_argument("--nodes", type=int, help="径向节点数")
    return parser


def load_config_file(path: str) -> Dict[str, Any]:
    """读取 JSON 配置文件

    Raises:
        ConfigError: 文件不存在、不是合法 JSON 或顶层不是对象
    """
    try:
        with open(path, 'r', encoding='utf-8') as f:
            data = json.load(f)
    except OSError as e:
        raise ConfigError(f"无法读取配置文件 {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise ConfigError(f"配置文件 {path} 不是合法的 JSON: {e}") from e
    if not isinstance(data, dict):
        raise ConfigError(f"配置文件 {path} 的顶层必须是对象")
    return data


def build_settings(args: argparse.Namespace, sections: Dict[str, Any]) -> ExperimentConfig:
    """experiment 节 < 命令行参数, 再由 ExperimentConfig 校验

    Raises:
        ConfigError: 校验失败
    """
    fields = dict(sections.get('experiment') or {})
    fields['command'] = args.command
    fields.setdefault('out', config.get('output.directory', 'results'))
    for name in FIELD_FLAGS:
        value = getattr(args, name, None)
        if value is not None:
            fields[name] = value
    if args.grid is not None:
        fields['resolutions'] = [args.grid]
    try:
        return ExperimentConfig(**fields)
    except ValidationError as e:
        raise ConfigError(f"配置无效: {e}") from e


def apply_sections(args: argparse.Namespace, sections: Dict[str, Any]) -> None:
    """把配置文件各模块节合并进全局配置; --grid 同时决定变分检查的分辨率"""
    modules = {key: value for key, value in sections.items() if key != 'experiment'}
    for key, value in modules.items():
        if not isinstance(value, dict):
            raise ConfigError(f"配置节 {key!r} 必须是对象")
    config.merge(modules)
    if args.grid is not None:
        config.set('variation.resolution', args.grid)
    level = args.log_level or config.get('logging.level', 'INFO')
    try:
        set_level(level)
    except ValueError as e:
        raise ConfigError(str(e)) from e
    try:
        set_log_file(config.get('logging.file'))
    except OSError as e:
        logger.warning(f"无法打开日志文件, 只输出到控制台: {e}")


def run_suite(settings: ExperimentConfig) -> SuiteResult:
    """运行一个子命令对应的套件并写出结果"""
    suite = SUITES[settings.command](settings)
    result = suite.execute()
    written = result.save(str(Path(settings.out) / settings.command))
    logger.info(f"结果写入 {len(written)} 个文件, 台账哈希 {result.ledger.ledger_hash[:12]}")
    return result


def exit_code(result: SuiteResult) -> int:
    if result.ledger.errors:
        return EXIT_NUMERICAL_FAILURE
    if result.ledger.failures:
        logger.warning(f"未通过的检查: {', '.join(result.ledger.failures)}")
        return EXIT_CHECKS_FAILED
    return EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    """命令行入口

    Args:
        argv: 参数列表, 缺省取 sys.argv[1:]

    Returns:
        int: 退出码
    """
    args = build_parser().parse_args(argv)
    saved = copy.deepcopy(config.config)
    try:
        sections = load_config_file(args.config) if args.config else {}
        apply_sections(args, sections)
        settings = build_settings(args, sections)
        result = run_suite(settings)
        return exit_code(result)
    except ConfigError as e:
        logger.error(f"配置错误: {e}")
        return EXIT_CONFIG_ERROR
    except (SigmaYamabeError, ArithmeticError) as e:
        logger.error(f"数值失败: {type(e).__name__}: {e}")
        return EXIT_NUMERICAL_FAILURE
    finally:
        # 同一进程内多次调用互不影响
        config.config = saved


if __name__ == "__main__":
    sys.exit(main())
