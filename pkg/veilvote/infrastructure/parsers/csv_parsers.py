"""
CSV parsers for labels and margin logs.
"""
from pathlib import Path
from typing import List, Sequence

import numpy as np
import pandas as pd

from veilvote.domain.exceptions import ConfigError
from veilvote.domain.models.privacy import MarginRecord
from veilvote.infrastructure.parsers.parser_factory import DataParser, PathLike


def _header(file_path: PathLike) -> List[str]:
    try:
        with open(file_path, "r", encoding="utf-8") as handle:
            first = handle.readline()
    except OSError:
        return []
    return [column.strip() for column in first.strip().split(",")]


def _read_frame(file_path: PathLike, columns: Sequence[str]) -> pd.DataFrame:
    path = Path(file_path)
    if not path.exists():
        raise ConfigError(f"file not found: {path}")
    try:
        frame = pd.read_csv(path, skipinitialspace=True)
    except (pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise ConfigError(f"cannot parse {path}: {e}") from e
    missing = [column for column in columns if column not in frame.columns]
    if missing:
        raise ConfigError(f"{path}: missing columns {missing}, expected header {','.join(columns)}")
    if frame[list(columns)].isnull().any().any():
        raise ConfigError(f"{path}: empty cells in {','.join(columns)}")
    return frame


class LabelsCsvParser(DataParser):
    """Parser for `index,label` files accompanying a VVFT feature matrix."""

    columns = ("index", "label")

    def can_parse(self, file_path: PathLike) -> bool:
        return str(file_path).lower().endswith(".csv") and _header(file_path)[:2] == list(self.columns)

    def parse(self, file_path: PathLike) -> np.ndarray:
        """
        Parse labels ordered by row index.

        Args:
            file_path: Path to the CSV file

        Returns:
            Integer label array where position i holds the label of feature row i
        """
        frame = _read_frame(file_path, self.columns).sort_values("index")
        indices = frame["index"].to_numpy(dtype=np.int64)
        if not np.array_equal(indices, np.arange(len(frame))):
            raise ConfigError(f"{file_path}: indices must cover 0..{len(frame) - 1} exactly once")
        return frame["label"].to_numpy(dtype=np.int64)


class MarginsCsvParser(DataParser):
    """Parser for `query_id,gamma` margin logs."""

    columns = ("query_id", "gamma")

    def can_parse(self, file_path: PathLike) -> bool:
        return str(file_path).lower().endswith(".csv") and _header(file_path)[:2] == list(self.columns)

    def parse(self, file_path: PathLike) -> List[MarginRecord]:
        frame = _read_frame(file_path, self.columns).sort_values("query_id", kind="stable")
        try:
            return [
                MarginRecord(int(query_id), float(gamma))
                for query_id, gamma in zip(frame["query_id"], frame["gamma"])
            ]
        except ValueError as e:
            raise ConfigError(f"{file_path}: {e}") from e
