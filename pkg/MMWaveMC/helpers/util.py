"""Dictionary helpers shared by the configuration loaders."""

import copy
from typing import Any, Dict


def deep_merge_dicts(base: Dict[str, Any], override: Dict[str, Any]) -> Dict[str, Any]:
    """Merge ``override`` into a copy of ``base``.

    Mappings present on both sides are merged key by key. Anything else in
    ``override`` (scalars, sweep lists, ``None``) replaces the base value
    outright. Neither argument is modified and the result shares no nested
    containers with them.

    Example:
        >>> deep_merge_dicts({'svp': {'step_size': 1.8, 'max_iterations': 100}},
        ...                  {'svp': {'step_size': 1.4}})
        {'svp': {'step_size': 1.4, 'max_iterations': 100}}
    """
    merged = copy.deepcopy(base)
    for key, value in override.items():
        if isinstance(merged.get(key), dict) and isinstance(value, dict):
            merged[key] = deep_merge_dicts(merged[key], value)
        else:
            merged[key] = copy.deepcopy(value)
    return merged
