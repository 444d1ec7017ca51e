"""Configuration files for dpne.

A config file is YAML with two optional sections: ``run`` supplies RunConfig
defaults and ``logging`` supplies the log level and file switch. String
values may reference environment variables (``${DPNE_DATA_DIR}``).
"""

import os
from pathlib import Path
from typing import Any, Dict, Optional, Tuple

import yaml

from .errors import ConfigError

DEFAULT_CONFIG_PATH = "config.yaml"
SECTIONS = ("run", "logging")


def load_config(config_path: str = DEFAULT_CONFIG_PATH) -> Dict[str, Any]:
    """Load a YAML config file with environment variables expanded.

    Args:
        config_path: Path to configuration file

    Returns:
        Configuration mapping; an empty file gives ``{}``

    Raises:
        FileNotFoundError: If config file doesn't exist
        yaml.YAMLError: If config file is invalid YAML
        TypeError: If the document root is not a mapping
    """
    path = Path(config_path)
    if not path.exists():
        raise FileNotFoundError(f"Configuration file not found: {config_path}")

    with path.open("r", encoding="utf-8") as f:
        document = yaml.safe_load(f) or {}

    if not isinstance(document, dict):
        raise TypeError(f"Configuration root must be a mapping, got {type(document).__name__}")
    return _expand_env_vars(document)


def load_sections(config_path: Optional[str]) -> Tuple[Dict[str, Any], Dict[str, Any]]:
    """The ``run`` and ``logging`` sections of a config file.

    With ``config_path`` None the default file is read if present and
    silently skipped otherwise; a path given explicitly must exist.

    Raises:
        ConfigError: Missing explicit file, unreadable YAML, or a section
            that is not a mapping
    """
    path = config_path or DEFAULT_CONFIG_PATH
    try:
        document = load_config(path)
    except FileNotFoundError:
        if config_path is None:
            return {}, {}
        raise ConfigError(f"Configuration file not found: {config_path}")
    except (yaml.YAMLError, TypeError) as e:
        raise ConfigError(f"Invalid configuration file {path}: {e}") from e

    sections = []
    for name in SECTIONS:
        section = document.get(name) or {}
        if not isinstance(section, dict):
            raise ConfigError(f"Config section '{name}' must be a mapping")
        sections.append(section)
    return sections[0], sections[1]


def dump_config(config: Dict[str, Any], output_path: Path) -> None:
    """Write a configuration mapping as YAML with sorted keys.

    The echo of a run is read back by load_config, so it reproduces the run.
    """
    with output_path.open("w", encoding="utf-8") as f:
        yaml.safe_dump(config, f, sort_keys=True, default_flow_style=False)


def _expand_env_vars(obj: Any) -> Any:
    if isinstance(obj, dict):
        return {key: _expand_env_vars(value) for key, value in obj.items()}
    if isinstance(obj, list):
        return [_expand_env_vars(item) for item in obj]
    if isinstance(obj, str):
        return os.path.expandvars(obj)
    return obj
