"""
Algebraic records: eigenvalue spectra, symmetric tensors, cone verdicts and
structure-condition reports.
"""

from dataclasses import dataclass, field
from typing import Any, Dict, List

import numpy as np

from sigma_yamabe.errors import DomainError
from sigma_yamabe.models.base_model import BaseModel

CONE_VERDICTS = ('inside', 'boundary', 'outside')


@dataclass(eq=False, repr=False)
class Spectrum(BaseModel):
    """Ordered eigenvalues (lambda_1, ..., lambda_n)."""

    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float).reshape(-1)
        if self.values.size < 1:
            raise DomainError("Spectrum needs at least one eigenvalue")
        if not np.all(np.isfinite(self.values)):
            raise DomainError(f"Spectrum has non-finite entries: {self.values}")

    @property
    def n(self) -> int:
        return int(self.values.size)

    @classmethod
    def ones(cls, n: int, scale: float = 1.0) -> 'Spectrum':
        """The spectrum ``scale * e`` with e = (1, ..., 1)."""
        return cls(np.full(n, float(scale)))

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'Spectrum':
        return cls(np.asarray(data['values'], dtype=float))

    def to_dict(self) -> Dict[str, Any]:
        return {'values': self.values.tolist()}


@dataclass(eq=False, repr=False)
class SymTensor(BaseModel):
    """Real symmetric n x n matrix.

    The entries are symmetrized on construction, so ``entries[i, j] ==
    entries[j, i]`` holds exactly.
    """

    entries: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.entries, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DomainError(f"SymTensor needs a square matrix, got shape {m.shape}")
        if not np.all(np.isfinite(m)):
            raise DomainError("SymTensor has non-finite entries")
        self.entries = 0.5 * (m + m.T)

    @property
    def n(self) -> int:
        return int(self.entries.shape[0])

    @classmethod
    def identity(cls, n: int, scale: float = 1.0) -> 'SymTensor':
        return cls(scale * np.eye(n))

    def spectrum(self) -> Spectrum:
        """Eigenvalues in ascending order."""
        return Spectrum(np.linalg.eigvalsh(self.entries))

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'SymTensor':
        return cls(np.asarray(data['entries'], dtype=float))

    def to_dict(self) -> Dict[str, Any]:
        return {'entries': self.entries.tolist()}


@dataclass(eq=False, repr=False)
class ConeTag(BaseModel):
    """Verdict of a Gamma_k^+ membership test."""

    k: int
    verdict: str
    sigmas: List[float] = field(default_factory=list)

    def __post_init__(self):
        if self.verdict not in CONE_VERDICTS:
            raise DomainError(f"Unknown cone verdict: {self.verdict}")
        self.sigmas = [float(s) for s in self.sigmas]

    @property
    def inside(self) -> bool:
        return self.verdict == 'inside'

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'ConeTag':
        return cls(k=int(data['k']), verdict=data['verdict'], sigmas=list(data.get('sigmas', [])))

    def to_dict(self) -> Dict[str, Any]:
        return {'k': self.k, 'verdict': self.verdict, 'sigmas': list(self.sigmas)}


@dataclass(eq=False, repr=False)
class StructureReport(BaseModel):
    """Sampled verification of the structure conditions S0-S3 and (A).

    Attributes:
        n: dimension.
        k: order.
        samples: number of sampled cone points.
        epsilon: worst observed S3 constant, min_i F^i sigma_1 / F.
        rho: worst observed condition-(A) constant; nan when no sample had a
            non-positive eigenvalue.
        checks: pass flag per condition name.
        margins: worst margin per condition name (positive means slack).
    """

    n: int
    k: int
    samples: int
    epsilon: float
    rho: float
    checks: Dict[str, bool] = field(default_factory=dict)
    margins: Dict[str, float] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'StructureReport':
        return cls(n=int(data['n']), k=int(data['k']), samples=int(data['samples']),
                   epsilon=float(data['epsilon']), rho=float(data['rho']),
                   checks=dict(data.get('checks', {})), margins=dict(data.get('margins', {})))

    def to_dict(self) -> Dict[str, Any]:
        return {
            'n': self.n,
            'k': self.k,
            'samples': self.samples,
            'epsilon': float(self.epsilon),
            'rho': float(self.rho),
            'checks': {k: bool(v) for k, v in self.checks.items()},
            'margins': {k: float(v) for k, v in self.margins.items()},
        }
