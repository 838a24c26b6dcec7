"""Logging for the sigma-Yamabe toolkit.

Every module logger lives under the ``sigma_yamabe`` namespace and propagates
to the namespace logger, which owns the handlers. ``set_level`` and
``set_log_file`` therefore act on the whole toolkit at once.
"""

import logging
from pathlib import Path
from typing import Optional, Union

NAMESPACE = 'sigma_yamabe'
LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
DEFAULT_LOG_FILE = Path.home() / '.sigma_yamabe' / 'sigma_yamabe.log'

_FILE_HANDLER_NAME = 'sigma_yamabe.file'


def _namespace_logger() -> logging.Logger:
    root = logging.getLogger(NAMESPACE)
    if not root.handlers:
        root.setLevel(logging.INFO)
        console = logging.StreamHandler()
        console.setFormatter(logging.Formatter(LOG_FORMAT))
        root.addHandler(console)
        try:
            set_log_file(DEFAULT_LOG_FILE)
        except OSError:
            # 只读的家目录: 只保留控制台输出
            pass
        root.propagate = False
    return root


def get_logger(name: str) -> logging.Logger:
    """Get a toolkit logger.

    Args:
        name: Logger name, typically ``__name__`` of the calling module. Names
            outside the ``sigma_yamabe`` namespace are nested under it.

    Returns:
        logging.Logger: A logger that propagates to the namespace handlers.
    """
    _namespace_logger()
    if name != NAMESPACE and not name.startswith(NAMESPACE + '.'):
        name = f'{NAMESPACE}.{name}'
    return logging.getLogger(name)


def set_level(level: Union[str, int]) -> None:
    """Apply a level (``"DEBUG"``, ``"INFO"`` ... or a number) to the toolkit.

    Raises:
        ValueError: unknown level name
    """
    numeric = logging.getLevelName(level.upper()) if isinstance(level, str) else level
    if not isinstance(numeric, int):
        raise ValueError(f"Unknown logging level: {level}")
    _namespace_logger().setLevel(numeric)


def set_log_file(path: Optional[Union[str, Path]]) -> Optional[Path]:
    """Redirect the toolkit's file log; ``None`` turns file logging off.

    Returns:
        Optional[Path]: The file now being written, if any.
    """
    root = logging.getLogger(NAMESPACE)
    for handler in [h for h in root.handlers if h.get_name() == _FILE_HANDLER_NAME]:
        root.removeHandler(handler)
        handler.close()
    if path is None:
        return None
    target = Path(path).expanduser()
    target.parent.mkdir(parents=True, exist_ok=True)
    handler = logging.FileHandler(target, encoding='utf-8')
    handler.set_name(_FILE_HANDLER_NAME)
    handler.setFormatter(logging.Formatter(LOG_FORMAT))
    root.addHandler(handler)
    return target
