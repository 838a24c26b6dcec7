"""
Run ledger: the machine-readable record of one CLI command.
"""

import time
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import pandas as pd

from sigma_yamabe import __version__
from sigma_yamabe.data.io import DataIO
from sigma_yamabe.errors import DomainError
from sigma_yamabe.models.base_model import BaseModel


@dataclass(eq=False, repr=False)
class RunLedger(BaseModel):
    """Per-check pass/fail rows of one command run.

    Each check name may appear only once. ``ledger_hash`` covers the command,
    the configuration and every row but not the wall-clock time, so identical
    configurations and seeds hash identically.
    """

    command: str
    config: Dict[str, Any] = field(default_factory=dict)
    rows: List[Dict[str, Any]] = field(default_factory=list)
    errors: List[Dict[str, Any]] = field(default_factory=list)
    wall_clock: float = 0.0
    _started: float = field(default_factory=time.perf_counter)

    @property
    def config_hash(self) -> str:
        return DataIO.sha256({'version': __version__, 'config': self.config})

    @property
    def ledger_hash(self) -> str:
        return DataIO.sha256({
            'command': self.command,
            'config_hash': self.config_hash,
            'rows': self.rows,
            'errors': self.errors,
        })

    @property
    def passed(self) -> bool:
        return not self.errors and all(row['passed'] for row in self.rows)

    @property
    def failures(self) -> List[str]:
        return [row['check'] for row in self.rows if not row['passed']]

    def add_check(self, check: str, passed: bool, residual: Optional[float] = None,
                  tolerance: Optional[float] = None, paper_ref: str = '',
                  **details: Any) -> Dict[str, Any]:
        """Append one check row.

        Raises:
            DomainError: If ``check`` has already been recorded.
        """
        if any(row['check'] == check for row in self.rows):
            raise DomainError(f"Check recorded twice: {check}")
        row = {
            'check': check,
            'passed': bool(passed),
            'residual': residual,
            'tolerance': tolerance,
            'paper_ref': paper_ref,
        }
        if details:
            row['details'] = DataIO.to_jsonable(details)
        self.rows.append(DataIO.to_jsonable(row))
        return row

    def add_error(self, check: str, error: BaseException, paper_ref: str = '') -> None:
        """Record a structured numerical failure."""
        payload = {
            'check': check,
            'error': type(error).__name__,
            'message': str(error),
            'paper_ref': paper_ref,
        }
        for attr in ('sigmas', 'node', 'spectrum', 'attempts', 'history', 'last_t', 'residual'):
            if hasattr(error, attr):
                payload[attr] = getattr(error, attr)
        self.errors.append(DataIO.to_jsonable(payload))

    def finish(self) -> 'RunLedger':
        self.wall_clock = time.perf_counter() - self._started
        return self

    def to_frame(self) -> pd.DataFrame:
        """Rows as a table (details flattened to JSON strings)."""
        records = []
        for row in self.rows:
            record = dict(row)
            if 'details' in record:
                record['details'] = DataIO.canonical_json(record['details']).strip()
            records.append(record)
        return pd.DataFrame(records, columns=['check', 'passed', 'residual', 'tolerance',
                                              'paper_ref', 'details'])

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'RunLedger':
        return cls(command=data['command'], config=dict(data.get('config', {})),
                   rows=list(data.get('rows', [])), errors=list(data.get('errors', [])),
                   wall_clock=float(data.get('wall_clock', 0.0)))

    def to_dict(self, with_timing: bool = True) -> Dict[str, Any]:
        data = {
            'command': self.command,
            'version': __version__,
            'config': self.config,
            'config_hash': self.config_hash,
            'ledger_hash': self.ledger_hash,
            'passed': self.passed,
            'rows': self.rows,
            'errors': self.errors,
        }
        if with_timing:
            data['wall_clock'] = self.wall_clock
        return data
