import json
import logging

import yaml


def load_config(config_path: str) -> dict:
    """Loads a configuration document (JSON or YAML) from disk."""
    logger = logging.getLogger(__name__)
    try:
        with open(config_path, encoding="utf-8") as file:
            return load_config_text(file.read())
    except FileNotFoundError:
        logger.error(f"Configuration file not found: {config_path}")
        raise


def load_config_text(text: str) -> dict:
    """Parses a configuration document.

    JSON is tried first so numbers such as ``1e4`` keep their JSON meaning;
    anything else goes through ``yaml.safe_load``.
    """
    try:
        data = json.loads(text)
    except json.JSONDecodeError:
        try:
            data = yaml.safe_load(text)
        except yaml.YAMLError as e:
            raise ValueError(f"Error parsing configuration file: {e}") from e
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ValueError("Configuration document must be a mapping at top level")
    return data
