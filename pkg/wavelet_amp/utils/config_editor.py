# config_editor.py

import copy
import json
from typing import Any, Dict, List, Mapping, Optional

import yaml

from wavelet_amp.utils.logger import logger

log = logger(__name__)


class ConfigEditor:
    """
    Layered experiment configuration.

    Layers are merged in the order they are added, the newest layer winning
    conflicts. Nested mappings merge key by key; any other value, lists
    included, replaces what was there.
    """

    def __init__(self, config: Optional[Mapping[str, Any]] = None):
        self.config: Dict[str, Any] = {}
        if config is not None:
            self.merge_with(config)

    @staticmethod
    def load_file(file_name: str) -> Dict[str, Any]:
        """Load a configuration layer from a JSON or YAML file."""
        with open(file_name, "r") as file:
            if file_name.endswith(".yaml") or file_name.endswith(".yml"):
                content = yaml.safe_load(file)
            elif file_name.endswith(".json"):
                content = json.load(file)
            else:
                raise ValueError("Unsupported file format. Use .json, .yaml, or .yml.")
        if content is None:
            return {}
        if not isinstance(content, Mapping):
            raise ValueError(f"Config file {file_name} must contain a mapping at the top level.")
        return dict(content)

    def _deep_merge(self, source: Mapping[Any, Any], destination: Dict[Any, Any]) -> Dict[Any, Any]:
        """
        Deep merge source into destination. Values from source win conflicts.

        Args:
            source (Mapping[Any, Any]): The layer being applied.
            destination (Dict[Any, Any]): The accumulated configuration.

        Returns:
            Dict[Any, Any]: The merged dictionary.
        """
        for key, value in source.items():
            if isinstance(value, Mapping) and isinstance(destination.get(key), Mapping):
                destination[key] = self._deep_merge(value, dict(destination[key]))
            else:
                destination[key] = copy.deepcopy(value)
        return destination

    def merge_with(self, layer: Mapping[str, Any]) -> "ConfigEditor":
        """Merge another layer on top of the current configuration."""
        if not isinstance(layer, Mapping):
            raise ValueError(f"A config layer must be a mapping, got {type(layer).__name__}.")
        self.config = self._deep_merge(layer, self.config)
        return self

    def get_or_create_part(self, keys: List[str], create: bool = False) -> Any:
        """
        Get a part of the configuration based on a list of keys. Optionally create
        intermediate mappings that do not exist.

        Args:
            keys (List[str]): Path of keys to the part.
            create (bool): If True, create missing intermediate mappings.

        Returns:
            Any: The value found at the path.
        """
        part = self.config
        for key in keys:
            if not isinstance(part, dict):
                raise KeyError(f"Part '{'.'.join(keys)}' does not exist in the config.")
            if create and key not in part:
                part[key] = {}
            if key not in part:
                raise KeyError(f"Part '{'.'.join(keys)}' does not exist in the config.")
            part = part[key]
        return part

    def set_part(self, dotted_key: str, value: Any) -> "ConfigEditor":
        """
        Set a value at a dotted path (e.g. "noise.std"), creating intermediate
        mappings as needed.
        """
        keys = dotted_key.split(".")
        parent = self.get_or_create_part(keys[:-1], create=True) if len(keys) > 1 else self.config
        if not isinstance(parent, dict):
            raise KeyError(f"Cannot set '{dotted_key}': '{'.'.join(keys[:-1])}' is not a mapping.")
        parent[keys[-1]] = copy.deepcopy(value)
        log.debug(f"set {dotted_key} = {value!r}")
        return self

    def to_dict(self) -> Dict[str, Any]:
        return copy.deepcopy(self.config)
