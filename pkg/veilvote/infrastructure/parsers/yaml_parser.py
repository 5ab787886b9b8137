"""
YAML parser for run configuration files.
"""
from pathlib import Path
from typing import Any, Dict

import yaml

from veilvote.domain.exceptions import ConfigError
from veilvote.infrastructure.parsers.parser_factory import DataParser, PathLike


class YamlParser(DataParser):
    """Parser for YAML run configs."""

    def can_parse(self, file_path: PathLike) -> bool:
        return Path(file_path).suffix.lower() in (".yaml", ".yml")

    def parse(self, file_path: PathLike) -> Dict[str, Any]:
        path = Path(file_path)
        if not path.exists():
            raise ConfigError(f"config file not found: {path}")
        try:
            with open(path, "r", encoding="utf-8") as handle:
                data = yaml.safe_load(handle)
        except yaml.YAMLError as e:
            raise ConfigError(f"invalid YAML in {path}: {e}") from e
        if not isinstance(data, dict):
            raise ConfigError(f"{path}: top level must be a mapping")
        return data
