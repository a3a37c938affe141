"""
Search space file loading.

Two formats are accepted:

JSON::

    {"lambda_p": [1e-6, 17], "lambda_e": [1e-6, 17], "batch_size": 64}

key=value lines (``#`` comments, one or two numbers per key)::

    lambda_p = 1e-6, 17
    lambda_e = 1e-6, 17
    batch_size = 64
"""

import json
import logging
from pathlib import Path
from typing import Any, Dict, Tuple, Union

from balance_hpo.exceptions import FormatError
from balance_hpo.space.reparam import DIMENSIONS, SearchSpace

logger = logging.getLogger(__name__)


def _as_range(name: str, value: Any, row: Union[int, None] = None) -> Tuple[float, float]:
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return float(value), float(value)
    if isinstance(value, (list, tuple)) and len(value) in (1, 2):
        try:
            numbers = [float(v) for v in value]
        except (TypeError, ValueError):
            raise FormatError(f"{name} must be numeric, got {value!r}", row=row) from None
        return numbers[0], numbers[-1]
    raise FormatError(f"{name} must be a number or [lo, hi], got {value!r}", row=row)


def space_from_dict(data: Dict[str, Any]) -> SearchSpace:
    """Build a SearchSpace from a mapping of dimension name to range."""
    missing = [name for name in DIMENSIONS if name not in data]
    if missing:
        raise FormatError(f"missing dimension(s): {', '.join(missing)}")
    unknown = sorted(set(data) - set(DIMENSIONS))
    if unknown:
        raise FormatError(f"unknown dimension(s): {', '.join(unknown)}")
    return SearchSpace.from_bounds([_as_range(name, data[name]) for name in DIMENSIONS])


def _parse_key_value(text: str) -> Dict[str, Any]:
    data: Dict[str, Any] = {}
    for row, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise FormatError(f"expected key=value, got {raw!r}", row=row)
        key, value = (part.strip() for part in line.split("=", 1))
        if key in data:
            raise FormatError(f"duplicate key '{key}'", row=row)
        try:
            numbers = [float(v) for v in value.replace(",", " ").split()]
        except ValueError:
            raise FormatError(f"non-numeric value for '{key}': {value!r}", row=row) from None
        data[key] = _as_range(key, numbers, row=row)
    return data


def load_search_space(path: Union[str, Path]) -> SearchSpace:
    """Load a SearchSpace from a JSON or key=value file."""
    path = Path(path)
    text = path.read_text()
    if path.suffix.lower() == ".json" or text.lstrip().startswith("{"):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as e:
            raise FormatError(f"invalid JSON in {path}: {e.msg}", row=e.lineno) from None
    else:
        data = _parse_key_value(text)
    space = space_from_dict(data)
    logger.debug(f"Loaded search space from {path}: {space.to_dict()}")
    return space
