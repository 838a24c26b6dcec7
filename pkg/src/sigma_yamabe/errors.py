"""
Exception hierarchy for the sigma-Yamabe toolkit.

Domain-style errors also derive from ``ValueError`` and numerical failures
from ``RuntimeError`` so callers catching the builtin types keep working.
"""

from typing import Any, List, Optional, Sequence


class SigmaYamabeError(Exception):
    """Base class for all toolkit errors."""


class DomainError(SigmaYamabeError, ValueError):
    """Order, dimension or argument outside the admissible range."""


class ConeViolationError(DomainError):
    """A spectrum lies on or outside the positive cone Gamma_k^+.

    Attributes:
        sigmas: sigma_1 ... sigma_k at the failing point.
        node: index of the failing node, if any.
        spectrum: eigenvalues at the failing point.
    """

    def __init__(self, message: str,
                 sigmas: Optional[Sequence[float]] = None,
                 node: Optional[Any] = None,
                 spectrum: Optional[Sequence[float]] = None):
        super().__init__(message)
        self.sigmas = None if sigmas is None else [float(s) for s in sigmas]
        self.node = node
        self.spectrum = None if spectrum is None else [float(s) for s in spectrum]


class SamplingError(SigmaYamabeError, RuntimeError):
    """Rejection sampler exhausted its retry limit."""

    def __init__(self, message: str, attempts: int = 0):
        super().__init__(message)
        self.attempts = attempts


class GeometryError(SigmaYamabeError, ValueError):
    """Metric not positive definite at some node."""

    def __init__(self, message: str, node: Optional[Any] = None,
                 point: Optional[Sequence[float]] = None):
        super().__init__(message)
        self.node = node
        self.point = None if point is None else [float(x) for x in point]


class UmbilicityError(SigmaYamabeError, ValueError):
    """Slice requested as umbilic but ``|L - mu g|`` is too large."""

    def __init__(self, message: str, residual: float = float('nan')):
        super().__init__(message)
        self.residual = residual


class UnsupportedChartError(SigmaYamabeError, ValueError):
    """Operation not available on this chart kind."""


class _HistoryError(SigmaYamabeError, RuntimeError):
    def __init__(self, message: str, history: Optional[List[float]] = None):
        super().__init__(message)
        self.history = list(history or [])


class NewtonMaxIterError(_HistoryError):
    """Newton iteration cap exceeded."""


class LineSearchError(_HistoryError):
    """Armijo damping fell below the minimum step."""


class ConeGuardError(_HistoryError):
    """Every damped Newton step left the cone."""


class SingularJacobianError(SigmaYamabeError, RuntimeError):
    """Linearized operator is singular within tolerance."""

    def __init__(self, message: str, condition: float = float('inf')):
        super().__init__(message)
        self.condition = condition


class ContinuationStuckError(SigmaYamabeError, RuntimeError):
    """Continuation step underflow."""

    def __init__(self, message: str, last_t: float = float('nan'),
                 reports: Optional[list] = None):
        super().__init__(message)
        self.last_t = last_t
        self.reports = list(reports or [])


class ConfigError(SigmaYamabeError, ValueError):
    """Unreadable or invalid experiment configuration."""
