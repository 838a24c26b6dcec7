"""
sigma-Yamabe toolkit.

Symmetric functions and Newton tensors, chart-based curvature, conformal
boundary functionals and a radial Newton-continuation solver for the
sigma_k-Yamabe problem on manifolds with boundary.
"""

__version__ = "0.1.0"

from sigma_yamabe.errors import (
    SigmaYamabeError,
    DomainError,
    ConeViolationError,
    ConfigError,
)

__all__ = [
    '__version__',
    'SigmaYamabeError',
    'DomainError',
    'ConeViolationError',
    'ConfigError',
]
