"""
Batch file loading for `loss eval`.

JSON: ``{"labels": [0, 0, 1, 1], "distances": [[...], ...]}``.
CSV: one row per batch item, no header; first column is the class id,
the remaining b columns are that item's row of the distance matrix.
"""

import json
from pathlib import Path
from typing import Union

import numpy as np
import pandas as pd

from balance_hpo.exceptions import FormatError
from balance_hpo.losses.contrastive import LabeledBatch


def load_batch(path: Union[str, Path]) -> LabeledBatch:
    """Load labels and a distance matrix from a JSON or CSV file."""
    path = Path(path)
    if path.suffix.lower() == ".json":
        try:
            data = json.loads(path.read_text())
        except json.JSONDecodeError as e:
            raise FormatError(f"invalid JSON in {path}: {e.msg}", row=e.lineno) from None
        if "labels" not in data or "distances" not in data:
            raise FormatError(f"{path} must contain 'labels' and 'distances'")
        labels = np.asarray(data["labels"])
        distances = np.asarray(data["distances"], dtype=float)
    else:
        try:
            frame = pd.read_csv(path, header=None, float_precision="round_trip")
        except (pd.errors.ParserError, pd.errors.EmptyDataError) as e:
            raise FormatError(f"cannot parse {path}: {e}") from None
        values = frame.apply(pd.to_numeric, errors="coerce")
        bad = values.isna().any(axis=1)
        if bad.any():
            raise FormatError("non-numeric entry", row=int(np.argmax(bad.to_numpy())) + 1)
        labels = values.iloc[:, 0].to_numpy().astype(int)
        distances = values.iloc[:, 1:].to_numpy(dtype=float)
    return LabeledBatch(labels=labels, distances=distances)
