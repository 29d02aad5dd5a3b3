import importlib
import json
import logging
import os
from enum import Enum
from typing import Any

import numpy as np

from claims_reserving.constants import APP_NAME, THREADS_ENV


def get_attr(method_string: str) -> Any:
    """Resolve a dotted path such as `claims_reserving.models.cc.CCRecipe`."""
    modulename, _, attrname = method_string.rpartition(".")
    if not modulename:
        return globals()[attrname]
    return getattr(importlib.import_module(modulename), attrname)


def logger(module: str | None = None) -> logging.Logger:
    name = f"{APP_NAME}.{module}" if module else APP_NAME
    return logging.getLogger(name)


def get_thread_count(default: int | None = None) -> int:
    value = os.environ.get(THREADS_ENV)
    if value:
        try:
            return max(1, int(value))
        except ValueError:
            logger().warning("Ignoring %s=%r, expected an integer", THREADS_ENV, value)
    if default:
        return max(1, default)
    return min(4, os.cpu_count() or 1)


def to_jsonable(value: Any) -> Any:
    """Convert numpy containers, enums and tuples into plain JSON values.

    Non-finite floats become null.
    """
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, dict):
        return {str(to_jsonable(k)): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, list | tuple):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return to_jsonable(value.tolist())
    if isinstance(value, np.bool_ | bool):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating | float):
        value = float(value)
        return value if np.isfinite(value) else None
    return value


def dumps(data: Any) -> str:
    return json.dumps(to_jsonable(data), sort_keys=True, indent=4)
