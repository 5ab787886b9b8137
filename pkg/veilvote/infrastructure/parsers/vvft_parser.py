"""
Parser for the VVFT dense float matrix format.

Layout (little-endian): magic b"VVFT", u32 rows, u32 cols, then rows * cols
float32 values in row-major order.
"""
import struct
from pathlib import Path

import numpy as np

from veilvote.domain.exceptions import ConfigError
from veilvote.infrastructure.parsers.parser_factory import DataParser, PathLike

MAGIC = b"VVFT"
_HEADER = struct.Struct("<4sII")


def read_vvft(file_path: PathLike) -> np.ndarray:
    """
    Read a VVFT file.

    Args:
        file_path: Path to the file

    Returns:
        float64 matrix of shape (rows, cols)
    """
    path = Path(file_path)
    if not path.exists():
        raise ConfigError(f"feature file not found: {path}")
    payload = path.read_bytes()
    if len(payload) < _HEADER.size:
        raise ConfigError(f"truncated VVFT header in {path}")
    magic, rows, cols = _HEADER.unpack_from(payload)
    if magic != MAGIC:
        raise ConfigError(f"bad magic {magic!r} in {path}, expected {MAGIC!r}")
    expected = rows * cols * 4
    body = payload[_HEADER.size:]
    if len(body) != expected:
        raise ConfigError(f"{path}: expected {expected} payload bytes for {rows}x{cols}, found {len(body)}")
    return np.frombuffer(body, dtype="<f4").reshape(rows, cols).astype(np.float64)


def write_vvft(file_path: PathLike, matrix: np.ndarray) -> Path:
    """Write a 2-D matrix as VVFT (values are stored as float32)."""
    matrix = np.atleast_2d(np.asarray(matrix))
    if matrix.ndim != 2:
        raise ValueError(f"VVFT stores 2-D matrices, got {matrix.ndim} dimensions")
    path = Path(file_path)
    rows, cols = matrix.shape
    with open(path, "wb") as handle:
        handle.write(_HEADER.pack(MAGIC, rows, cols))
        handle.write(np.ascontiguousarray(matrix, dtype="<f4").tobytes())
    return path


class VvftParser(DataParser):
    """Parser for VVFT feature files."""

    def can_parse(self, file_path: PathLike) -> bool:
        path = Path(file_path)
        if path.suffix.lower() in (".vvft", ".bin"):
            return True
        try:
            with open(path, "rb") as handle:
                return handle.read(4) == MAGIC
        except OSError:
            return False

    def parse(self, file_path: PathLike) -> np.ndarray:
        return read_vvft(file_path)
