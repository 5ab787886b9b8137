"""
Configuration loader for YAML files.
"""
import os
import yaml
from typing import Any, Dict, List, Optional
from pathlib import Path

ENV_PREFIX = "VEILVOTE_"


class ConfigLoader:
    """Loader for configuration from YAML files."""

    def __init__(self, env: Optional[str] = None, config_dir: Optional[Path] = None):
        self.config: Dict[str, Any] = {}
        self.env = env or os.getenv("VEILVOTE_ENV", "development")
        self.config_dir = Path(config_dir) if config_dir else Path(__file__).parent

    def load(self) -> Dict[str, Any]:
        """
        Load configuration based on current environment.

        Returns:
            Configuration dictionary
        """
        # Load base configuration
        self.config = self._read_yaml(self.config_dir / "base.yaml")

        # Environment overlay, then the unversioned local overlay
        for overlay in (f"{self.env}.yaml", f"{self.env}.local.yaml"):
            self._deep_update(self.config, self._read_yaml(self.config_dir / overlay))

        # Override from environment variables
        self._override_from_env()

        return self.config

    @staticmethod
    def _read_yaml(path: Path) -> Dict[str, Any]:
        if not path.exists():
            return {}
        with open(path, "r") as f:
            return yaml.safe_load(f) or {}

    def _deep_update(self, target: Dict[str, Any], source: Dict[str, Any]) -> None:
        """
        Deep update of nested dictionaries.

        Args:
            target: Target dictionary
            source: Source dictionary
        """
        for key, value in source.items():
            if isinstance(value, dict) and key in target and isinstance(target[key], dict):
                self._deep_update(target[key], value)
            else:
                target[key] = value

    def _override_from_env(self) -> None:
        """Override configuration from environment variables."""
        # VEILVOTE_THREADS overrides config["threads"],
        # VEILVOTE_ACCOUNTING_DEFAULT_DELTA overrides config["accounting"]["default_delta"]
        for env_var, value in os.environ.items():
            if not env_var.startswith(ENV_PREFIX) or env_var == "VEILVOTE_ENV":
                continue
            parts = env_var[len(ENV_PREFIX):].lower().split("_")
            self._set_nested(self.config, self._resolve_keys(self.config, parts), self._coerce(value))

    @staticmethod
    def _resolve_keys(config: Dict[str, Any], parts: List[str]) -> List[str]:
        """Group name parts into existing keys, longest match first; unknown tails form one key."""
        keys: List[str] = []
        node: Any = config
        start = 0
        while start < len(parts):
            match = None
            if isinstance(node, dict):
                for end in range(len(parts), start, -1):
                    candidate = "_".join(parts[start:end])
                    if candidate in node:
                        match = (candidate, end)
                        break
            if match is None:
                keys.append("_".join(parts[start:]))
                return keys
            keys.append(match[0])
            node = node[match[0]]
            start = match[1]
        return keys

    @staticmethod
    def _coerce(value: str) -> Any:
        try:
            parsed = yaml.safe_load(value)
        except yaml.YAMLError:
            return value
        return parsed if isinstance(parsed, (int, float, bool)) else value

    def _set_nested(self, config: Dict[str, Any], keys: list, value: Any) -> None:
        """
        Set value in nested dictionary.

        Args:
            config: Configuration dictionary
            keys: List of keys
            value: Value to set
        """
        if len(keys) == 1:
            config[keys[0]] = value
        else:
            key = keys[0]
            if not isinstance(config.get(key), dict):
                config[key] = {}
            self._set_nested(config[key], keys[1:], value)


# Create singleton for configuration
config_loader = ConfigLoader()
config = config_loader.load()


def get_config() -> Dict[str, Any]:
    """
    Get current configuration.

    Returns:
        Configuration dictionary
    """
    return config


def worker_count() -> int:
    """Worker cap for parallel teacher training and repeats (VEILVOTE_THREADS)."""
    try:
        return max(1, int(get_config().get("threads", 1)))
    except (TypeError, ValueError):
        return 1
