"""
Plain data records of the sigma-Yamabe toolkit.
"""

from sigma_yamabe.models.base_model import BaseModel
from sigma_yamabe.models.tensors import Spectrum, SymTensor, ConeTag, StructureReport
from sigma_yamabe.models.experiment import ExperimentConfig
from sigma_yamabe.models.ledger import RunLedger

__all__ = [
    'BaseModel',
    'Spectrum',
    'SymTensor',
    'ConeTag',
    'StructureReport',
    'ExperimentConfig',
    'RunLedger',
]
