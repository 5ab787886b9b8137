"""
Configuration for veilvote.
"""
from veilvote.config.config_loader import ConfigLoader, get_config

__all__ = ["ConfigLoader", "get_config"]
