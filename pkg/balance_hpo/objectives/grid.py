"""
Precomputed performance grids.

Scores are stored on a rectangular (Λp, Λe, b) lattice and interpolated
multilinearly in log coordinates. Axes of length 1 are pinned dimensions.

CSV layout (optional leading ``# key=value`` metadata lines)::

    # metric=R-mAP
    # dataset=omniglot
    lambda_p,lambda_e,batch_size,score
    0.001,0.5,64,0.61
    ...

Rows may appear in any order; every axis combination must be present once.
"""

import io
import itertools
import logging
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Dict, List, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from scipy.interpolate import RegularGridInterpolator

from balance_hpo.exceptions import FormatError, InvalidConfig, OutOfDomain
from balance_hpo.space.reparam import DIMENSIONS, HyperConfig, SearchSpace

logger = logging.getLogger(__name__)

GRID_COLUMNS = (*DIMENSIONS, "score")
HULL_RTOL = 1e-9


@dataclass
class PerformanceGrid:
    """Dense score tensor over three strictly increasing positive axes."""

    axes: Tuple[np.ndarray, np.ndarray, np.ndarray]
    scores: np.ndarray
    metadata: Dict[str, str] = field(default_factory=dict)
    name: str = "grid"

    def __post_init__(self):
        self.axes = tuple(np.asarray(axis, dtype=float) for axis in self.axes)
        self.scores = np.asarray(self.scores, dtype=float)
        if len(self.axes) != 3:
            raise InvalidConfig(f"a grid needs 3 axes, got {len(self.axes)}")
        for dim, axis in zip(DIMENSIONS, self.axes):
            if axis.ndim != 1 or axis.size == 0:
                raise InvalidConfig(f"{dim} axis must be a non-empty 1D array")
            if np.any(axis <= 0) or not np.all(np.isfinite(axis)):
                raise InvalidConfig(f"{dim} axis must be finite and positive")
            if np.any(np.diff(axis) <= 0):
                raise InvalidConfig(f"{dim} axis must be strictly increasing")
        shape = tuple(axis.size for axis in self.axes)
        if self.scores.shape != shape:
            raise InvalidConfig(f"score tensor shape {self.scores.shape} does not match axes {shape}")
        if not np.all(np.isfinite(self.scores)):
            raise InvalidConfig("grid scores must be finite")

    @property
    def shape(self) -> Tuple[int, int, int]:
        return tuple(axis.size for axis in self.axes)

    @property
    def metric(self) -> str:
        return self.metadata.get("metric", "score")

    @cached_property
    def _log_axes(self) -> Tuple[np.ndarray, ...]:
        return tuple(np.log(axis) for axis in self.axes)

    @cached_property
    def _active(self) -> List[int]:
        return [k for k, axis in enumerate(self.axes) if axis.size > 1]

    @cached_property
    def _interpolator(self) -> Union[RegularGridInterpolator, None]:
        if not self._active:
            return None
        squeezed = self.scores.reshape([self.shape[k] for k in self._active])
        return RegularGridInterpolator(
            tuple(self._log_axes[k] for k in self._active),
            squeezed,
            method="linear",
            bounds_error=True,
        )

    def __call__(self, h: HyperConfig) -> float:
        return grid_interpolate(self, h)


def grid_hull(grid: PerformanceGrid) -> SearchSpace:
    """Bounding box of the grid axes as a search space."""
    return SearchSpace.from_bounds([(float(axis[0]), float(axis[-1])) for axis in grid.axes])


def grid_interpolate(grid: PerformanceGrid, h: HyperConfig) -> float:
    """Multilinear interpolation in log coordinates; never extrapolates."""
    log_h = h.log()
    point = np.empty(3)
    for k, (dim, log_axis) in enumerate(zip(DIMENSIONS, grid._log_axes)):
        lo, hi = log_axis[0], log_axis[-1]
        slack = HULL_RTOL * max(1.0, abs(lo), abs(hi))
        if not lo - slack <= log_h[k] <= hi + slack:
            raise OutOfDomain(
                f"{dim}={h.as_tuple()[k]:.6g} outside grid range "
                f"[{grid.axes[k][0]:.6g}, {grid.axes[k][-1]:.6g}]"
            )
        point[k] = min(max(log_h[k], lo), hi)

    if grid._interpolator is None:
        return float(grid.scores.reshape(-1)[0])
    return float(grid._interpolator(point[grid._active][None, :])[0])


def _split_metadata(text: str) -> Tuple[Dict[str, str], str, int]:
    metadata: Dict[str, str] = {}
    lines = text.splitlines(keepends=True)
    skipped = 0
    for line in lines:
        stripped = line.strip()
        if not stripped.startswith("#"):
            break
        skipped += 1
        key, sep, value = stripped.lstrip("#").partition("=")
        if sep:
            metadata[key.strip()] = value.strip()
    return metadata, "".join(lines[skipped:]), skipped


def _parse_cell(text) -> float:
    """Exact float for one CSV cell; NaN when it is missing or not a number."""
    try:
        return float(text)
    except (TypeError, ValueError):
        return np.nan


def grid_load(path: Union[str, Path]) -> PerformanceGrid:
    """Load a grid CSV, validating rectangular coverage."""
    path = Path(path)
    metadata, body, skipped = _split_metadata(path.read_text())
    first_row = skipped + 2  # file line of the first data row

    try:
        frame = pd.read_csv(io.StringIO(body), dtype=str, skipinitialspace=True)
    except (pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise FormatError(f"cannot parse {path}: {e}") from None

    columns = [c.strip() for c in frame.columns]
    if tuple(columns) != GRID_COLUMNS:
        raise FormatError(f"header must be {','.join(GRID_COLUMNS)}, got {','.join(columns)}", row=skipped + 1)
    frame.columns = columns
    if frame.empty:
        raise FormatError(f"{path} has no data rows")

    # float() round-trips repr output exactly; pandas' fast parser can be off by one ulp.
    values = frame.apply(lambda column: column.map(_parse_cell))
    for offset, row in enumerate(values.itertuples(index=False)):
        line = first_row + offset
        if any(pd.isna(v) for v in row):
            raise FormatError("malformed row (missing or non-numeric field)", row=line)
        if not np.isfinite(row.score):
            raise FormatError(f"non-finite score {row.score}", row=line)
        coords = (row.lambda_p, row.lambda_e, row.batch_size)
        if not all(np.isfinite(c) and c > 0 for c in coords):
            raise FormatError("coordinates must be finite and positive", row=line)

    duplicated = values.duplicated(subset=list(DIMENSIONS))
    if duplicated.any():
        line = first_row + int(np.argmax(duplicated.to_numpy()))
        raise FormatError("duplicate coordinates", row=line)

    axes = tuple(np.unique(values[dim].to_numpy(dtype=float)) for dim in DIMENSIONS)
    expected = int(np.prod([axis.size for axis in axes]))
    if len(values) != expected:
        present = set(values[list(DIMENSIONS)].itertuples(index=False, name=None))
        missing = next(c for c in itertools.product(*axes) if c not in present)
        raise FormatError(
            f"grid is not rectangular: missing node lambda_p={missing[0]:g}, "
            f"lambda_e={missing[1]:g}, batch_size={missing[2]:g}",
            row=first_row + len(values),  # where the missing row would go
        )

    scores = np.empty(tuple(axis.size for axis in axes))
    idx = [np.searchsorted(axis, values[dim].to_numpy(dtype=float)) for axis, dim in zip(axes, DIMENSIONS)]
    scores[idx[0], idx[1], idx[2]] = values["score"].to_numpy(dtype=float)

    grid = PerformanceGrid(axes=axes, scores=scores, metadata=metadata, name=path.stem)
    logger.info(f"Loaded grid {path} with shape {grid.shape} ({grid.metric})")
    return grid


def grid_save(grid: PerformanceGrid, path: Union[str, Path]) -> Path:
    """Write a grid CSV (rows in lattice order, LF line endings)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    nodes = list(itertools.product(*grid.axes))
    frame = pd.DataFrame(nodes, columns=list(DIMENSIONS))
    frame["score"] = grid.scores.reshape(-1)
    with open(path, "w", newline="") as f:
        for key, value in grid.metadata.items():
            f.write(f"# {key}={value}\n")
        frame.to_csv(f, index=False, lineterminator="\n")
    return path


def grid_from_function(
    fn,
    axes: Sequence[Sequence[float]],
    metadata: Union[Dict[str, str], None] = None,
) -> PerformanceGrid:
    """Tabulate a scalar function of HyperConfig on a lattice."""
    axes = tuple(np.asarray(a, dtype=float) for a in axes)
    scores = np.empty(tuple(a.size for a in axes))
    for idx in itertools.product(*(range(a.size) for a in axes)):
        scores[idx] = fn(HyperConfig(*(float(axes[k][idx[k]]) for k in range(3))))
    return PerformanceGrid(axes=axes, scores=scores, metadata=dict(metadata or {}))
