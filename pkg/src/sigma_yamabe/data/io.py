"""
Data export functionality for the sigma-Yamabe toolkit.

Everything written here is text (CSV or JSON) and byte-deterministic for
identical inputs: JSON is canonical (sorted keys, fixed separators) and CSV
floats use a fixed format.
"""

import os
import json
import hashlib
import itertools
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Union

import numpy as np
import pandas as pd

from sigma_yamabe.config import config
from sigma_yamabe.utils import ensure_directory_exists
from sigma_yamabe.utils.logger import get_logger

logger = get_logger(__name__)


class DataIO:
    """Handles export and import of toolkit artifacts."""

    SUPPORTED_FORMATS = {
        'csv': ('Comma-Separated Values', '.csv'),
        'json': ('JSON', '.json'),
    }

    @classmethod
    def get_supported_formats(cls) -> Dict[str, str]:
        """Get a dictionary of supported file formats and their extensions.

        Returns:
            Dict[str, str]: Format name to extension mapping.
        """
        return {k: v[1] for k, v in cls.SUPPORTED_FORMATS.items()}

    @classmethod
    def detect_format(cls, file_path: Union[str, Path]) -> Optional[str]:
        """Detect the format of a file based on its extension.

        Args:
            file_path: Path to the file.

        Returns:
            str: Format name or None if not supported.
        """
        ext = Path(file_path).suffix.lower()
        for fmt, (_, format_ext) in cls.SUPPORTED_FORMATS.items():
            if ext == format_ext:
                return fmt
        return None

    @staticmethod
    def to_jsonable(obj: Any) -> Any:
        """Convert numpy scalars/arrays and nested containers to plain JSON types.

        Non-finite floats become ``None`` so the output is strict JSON.
        """
        if isinstance(obj, Mapping):
            return {str(k): DataIO.to_jsonable(v) for k, v in obj.items()}
        if isinstance(obj, (list, tuple)):
            return [DataIO.to_jsonable(v) for v in obj]
        if isinstance(obj, np.ndarray):
            return DataIO.to_jsonable(obj.tolist())
        if isinstance(obj, (np.bool_, bool)):
            return bool(obj)
        if isinstance(obj, (np.integer, int)):
            return int(obj)
        if isinstance(obj, (np.floating, float)):
            value = float(obj)
            return value if np.isfinite(value) else None
        if hasattr(obj, 'to_dict'):
            return DataIO.to_jsonable(obj.to_dict())
        if obj is None or isinstance(obj, str):
            return obj
        return str(obj)

    @classmethod
    def canonical_json(cls, obj: Any) -> str:
        """Canonical JSON text: sorted keys, compact separators, trailing newline."""
        return json.dumps(cls.to_jsonable(obj), sort_keys=True, ensure_ascii=False,
                          separators=(",", ":")) + "\n"

    @classmethod
    def sha256(cls, obj: Any) -> str:
        """SHA-256 hex digest of the canonical JSON encoding of ``obj``."""
        return hashlib.sha256(cls.canonical_json(obj).encode("utf-8")).hexdigest()

    @staticmethod
    def _atomic_write_text(path: Path, text: str) -> None:
        tmp = path.with_name(path.name + ".tmp")
        with tmp.open("w", encoding="utf-8", newline="\n") as f:
            f.write(text)
            f.flush()
            os.fsync(f.fileno())
        os.replace(str(tmp), str(path))

    @classmethod
    def write_json(cls, obj: Any, file_path: Union[str, Path]) -> Path:
        """Write ``obj`` as canonical JSON, replacing the target atomically.

        Args:
            obj: Any JSON-convertible object (records with ``to_dict`` allowed).
            file_path: Destination path.

        Returns:
            Path: The written path.
        """
        path = Path(file_path)
        ensure_directory_exists(str(path.parent))
        cls._atomic_write_text(path, cls.canonical_json(obj))
        logger.info(f"Wrote {path}")
        return path

    @classmethod
    def read_json(cls, file_path: Union[str, Path]) -> Any:
        """Read a JSON file.

        Raises:
            FileNotFoundError: If the file does not exist.
            ValueError: If the content is not valid JSON.
        """
        path = Path(file_path)
        if not path.exists():
            raise FileNotFoundError(f"File not found: {path}")
        try:
            with path.open('r', encoding='utf-8') as f:
                return json.load(f)
        except json.JSONDecodeError as e:
            raise ValueError(f"Invalid JSON in {path}: {e}") from e

    @classmethod
    def write_table(cls, df: pd.DataFrame, file_path: Union[str, Path],
                    float_format: Optional[str] = None) -> Path:
        """Write a DataFrame as CSV with a fixed float format.

        Args:
            df: Table to write.
            file_path: Destination path; the extension selects the format.
            float_format: printf-style float format, defaults to ``output.float_format``.

        Returns:
            Path: The written path.

        Raises:
            ValueError: If the extension is not a supported format.
        """
        path = Path(file_path)
        fmt = cls.detect_format(path)
        if fmt is None:
            raise ValueError(f"Unsupported file format: {path.suffix}")
        ensure_directory_exists(str(path.parent))
        if fmt == 'json':
            return cls.write_json(df.to_dict(orient='records'), path)
        float_format = float_format or config.get('output.float_format', '%.12e')
        text = df.to_csv(index=False, float_format=float_format, lineterminator="\n")
        cls._atomic_write_text(path, text)
        logger.info(f"Wrote {path} ({len(df)} rows)")
        return path

    @staticmethod
    def flatten_fields(points: np.ndarray, fields: Mapping[str, np.ndarray]) -> pd.DataFrame:
        """Flatten node coordinates and per-node tensor fields into one table.

        Column names are ``x0 .. x{n-1}`` for coordinates and
        ``<name>_<i><j>...`` for tensor components.

        Args:
            points: (N, n) node coordinates.
            fields: name -> array of shape (N, ...) per node.

        Returns:
            pd.DataFrame: One row per node.
        """
        points = np.asarray(points, dtype=float)
        columns: Dict[str, np.ndarray] = {}
        for j in range(points.shape[1]):
            columns[f"x{j}"] = points[:, j]
        for name, values in fields.items():
            values = np.asarray(values)
            if values.ndim == 1:
                columns[name] = values
                continue
            for index in itertools.product(*(range(s) for s in values.shape[1:])):
                suffix = ''.join(str(i) for i in index)
                columns[f"{name}_{suffix}"] = values[(slice(None),) + index]
        return pd.DataFrame(columns)

    @classmethod
    def export_curvature_pack(cls, pack: Any, file_path: Union[str, Path]) -> Path:
        """Export a curvature pack (node coordinates + tensor components) to CSV.

        Args:
            pack: Object exposing ``points`` and ``fields()``.
            file_path: Destination CSV path.

        Returns:
            Path: The written path.
        """
        df = cls.flatten_fields(pack.points, pack.fields())
        return cls.write_table(df, file_path)
