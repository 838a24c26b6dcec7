"""
Base model class for the data records of the sigma-Yamabe toolkit.
"""

from abc import ABC, abstractmethod
from typing import Any, Dict, List, Type, TypeVar

import pandas as pd

T = TypeVar('T', bound='BaseModel')


class BaseModel(ABC):
    """Base class for all plain data records."""

    @classmethod
    @abstractmethod
    def from_dict(cls: Type[T], data: Dict[str, Any]) -> T:
        """Create a record from a dictionary.

        Args:
            data: Dictionary containing record data.

        Returns:
            An instance of the record.
        """

    @abstractmethod
    def to_dict(self) -> Dict[str, Any]:
        """Convert the record to a JSON-friendly dictionary.

        Returns:
            Dictionary representation of the record.
        """

    @classmethod
    def to_dataframe(cls, items: List[T]) -> pd.DataFrame:
        """Convert a list of records to a pandas DataFrame.

        Args:
            items: List of records.

        Returns:
            DataFrame with one row per record.
        """
        return pd.DataFrame([item.to_dict() for item in items])

    def copy(self: T) -> T:
        """Create a deep copy of the record.

        Returns:
            A new instance with the same data.
        """
        return self.__class__.from_dict(self.to_dict())

    def __eq__(self, other: Any) -> bool:
        """Check if two records are equal."""
        if not isinstance(other, self.__class__):
            return False
        return self.to_dict() == other.to_dict()

    def __repr__(self) -> str:
        """Get a string representation of the record."""
        return f"{self.__class__.__name__}({self.to_dict()})"
