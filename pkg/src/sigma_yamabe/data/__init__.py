"""
Serialization of ledgers, tables and curvature packs.
"""

from sigma_yamabe.data.io import DataIO

__all__ = ['DataIO']
