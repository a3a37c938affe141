"""
Search space H over (Λp, Λe, b) and its log-space reparameterization.

A configuration h maps to r = A·log h (natural log). Rows of A are the
line-search directions in log-h space; the `balance` preset is

    (-1, 1, 0)   balance between positive and entropy terms
    ( 1, 1, 0)   joint learning rate
    ( 0, 0, 1)   batch size
"""

import math
from dataclasses import dataclass
from typing import Dict, Iterable, Sequence, Tuple

import numpy as np

from balance_hpo.exceptions import InvalidConfig, SingularMatrix, UnknownPreset

DIMENSIONS: Tuple[str, str, str] = ("lambda_p", "lambda_e", "batch_size")

SINGULAR_TOLERANCE = 1e-9


@dataclass(frozen=True)
class HyperConfig:
    """A point h = (Λp, Λe, b) of the positive orthant."""

    lambda_p_rate: float
    lambda_e_rate: float
    batch_size: float

    def __post_init__(self):
        for name, value in zip(DIMENSIONS, self.as_tuple()):
            if not math.isfinite(value) or value <= 0:
                raise InvalidConfig(f"{name} must be finite and > 0, got {value}")

    @classmethod
    def from_array(cls, values: Iterable[float]) -> "HyperConfig":
        lp, le, b = (float(v) for v in values)
        return cls(lp, le, b)

    def as_tuple(self) -> Tuple[float, float, float]:
        return (self.lambda_p_rate, self.lambda_e_rate, self.batch_size)

    def as_array(self) -> np.ndarray:
        return np.array(self.as_tuple(), dtype=float)

    def log(self) -> np.ndarray:
        """Componentwise natural log."""
        return np.log(self.as_array())

    def to_dict(self) -> Dict[str, float]:
        return dict(zip(DIMENSIONS, self.as_tuple()))

    def __str__(self) -> str:
        return f"(Λp={self.lambda_p_rate:.6g}, Λe={self.lambda_e_rate:.6g}, b={self.batch_size:.6g})"


@dataclass(frozen=True)
class SearchSpace:
    """Closed box lo_i <= h_i <= hi_i; a dimension with lo == hi is pinned."""

    lambda_p: Tuple[float, float]
    lambda_e: Tuple[float, float]
    batch_size: Tuple[float, float]

    def __post_init__(self):
        for name, (lo, hi) in zip(DIMENSIONS, self.bounds):
            if not (math.isfinite(lo) and math.isfinite(hi)):
                raise InvalidConfig(f"{name} bounds must be finite, got ({lo}, {hi})")
            if not 0 < lo <= hi:
                raise InvalidConfig(f"{name} bounds must satisfy 0 < lo <= hi, got ({lo}, {hi})")

    @classmethod
    def from_bounds(cls, bounds: Sequence[Sequence[float]]) -> "SearchSpace":
        (lp_lo, lp_hi), (le_lo, le_hi), (b_lo, b_hi) = bounds
        return cls(
            (float(lp_lo), float(lp_hi)),
            (float(le_lo), float(le_hi)),
            (float(b_lo), float(b_hi)),
        )

    @property
    def bounds(self) -> Tuple[Tuple[float, float], ...]:
        return (self.lambda_p, self.lambda_e, self.batch_size)

    @property
    def lower(self) -> np.ndarray:
        return np.array([lo for lo, _ in self.bounds], dtype=float)

    @property
    def upper(self) -> np.ndarray:
        return np.array([hi for _, hi in self.bounds], dtype=float)

    @property
    def active_mask(self) -> np.ndarray:
        """True for dimensions the search may vary."""
        return self.lower < self.upper

    @property
    def active_dims(self) -> Tuple[str, ...]:
        return tuple(name for name, active in zip(DIMENSIONS, self.active_mask) if active)

    def clip(self, values: np.ndarray) -> HyperConfig:
        """Clamp raw values into the box (absorbs exp/log rounding)."""
        return HyperConfig.from_array(np.clip(values, self.lower, self.upper))

    def center(self) -> HyperConfig:
        """Log-space center of the box."""
        return HyperConfig.from_array(np.sqrt(self.lower * self.upper))

    def to_dict(self) -> Dict[str, object]:
        return {
            name: (lo if lo == hi else [lo, hi])
            for name, (lo, hi) in zip(DIMENSIONS, self.bounds)
        }


@dataclass(frozen=True)
class ReparamMatrix:
    """3×3 matrix whose rows are search directions in log-h space."""

    rows: Tuple[Tuple[float, float, float], ...]
    name: str = "custom"

    @classmethod
    def from_values(cls, values: Sequence[float], name: str = "custom") -> "ReparamMatrix":
        """Build from nine numbers in row-major order."""
        values = [float(v) for v in values]
        if len(values) != 9:
            raise InvalidConfig(f"a reparameterization matrix needs 9 numbers, got {len(values)}")
        if not all(math.isfinite(v) for v in values):
            raise InvalidConfig(f"matrix entries must be finite, got {values}")
        return cls(tuple(tuple(values[i:i + 3]) for i in range(0, 9, 3)), name=name)

    @property
    def array(self) -> np.ndarray:
        return np.array(self.rows, dtype=float)

    def row(self, index: int) -> np.ndarray:
        return np.array(self.rows[index], dtype=float)

    @property
    def determinant(self) -> float:
        (a, b, c), (d, e, f), (g, h, i) = self.rows
        return a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g)

    @property
    def is_invertible(self) -> bool:
        return abs(self.determinant) > SINGULAR_TOLERANCE

    def inverse(self) -> np.ndarray:
        """Closed-form adjugate inverse; columns are cross products of row pairs."""
        det = self.determinant
        if abs(det) <= SINGULAR_TOLERANCE:
            raise SingularMatrix(f"matrix '{self.name}' has determinant {det:.3g}")
        r0, r1, r2 = (self.row(k) for k in range(3))
        adjugate = np.column_stack([np.cross(r1, r2), np.cross(r2, r0), np.cross(r0, r1)])
        return adjugate / det

    def to_list(self) -> list:
        return [v for row in self.rows for v in row]


@dataclass(frozen=True)
class ReparamPoint:
    """Coordinates r in the reparameterized system."""

    coords: Tuple[float, float, float]

    def __post_init__(self):
        if not all(math.isfinite(v) for v in self.coords):
            raise InvalidConfig(f"reparameterized coordinates must be finite, got {self.coords}")

    def as_array(self) -> np.ndarray:
        return np.array(self.coords, dtype=float)

    def __getitem__(self, index: int) -> float:
        return self.coords[index]


PRESET_MATRICES: Dict[str, Tuple[Tuple[float, float, float], ...]] = {
    "balance": ((-1.0, 1.0, 0.0), (1.0, 1.0, 0.0), (0.0, 0.0, 1.0)),
    "identity": ((1.0, 0.0, 0.0), (0.0, 1.0, 0.0), (0.0, 0.0, 1.0)),
    "theory": ((1.0, 0.0, -1.0), (0.0, 1.0, -2.0), (1.0, -1.0, 0.0)),
}

ROW_LABELS: Dict[str, Tuple[str, str, str]] = {
    "balance": ("balance", "joint rate", "batch size"),
    "identity": ("lambda_p", "lambda_e", "batch size"),
}


def preset_matrix(name: str) -> ReparamMatrix:
    """Return a named preset matrix exactly."""
    try:
        rows = PRESET_MATRICES[name.lower()]
    except KeyError:
        raise UnknownPreset(
            f"unknown matrix preset '{name}' (choose from {', '.join(PRESET_MATRICES)})"
        ) from None
    return ReparamMatrix(rows, name=name.lower())


def parse_matrix(text: str) -> ReparamMatrix:
    """Parse a preset name or nine comma/space separated numbers."""
    text = text.strip()
    if text.lower() in PRESET_MATRICES:
        return preset_matrix(text)
    parts = text.replace(",", " ").split()
    try:
        values = [float(p) for p in parts]
    except ValueError:
        raise UnknownPreset(
            f"'{text}' is neither a matrix preset ({', '.join(PRESET_MATRICES)}) nor 9 numbers"
        ) from None
    return ReparamMatrix.from_values(values)


def to_reparam(h: HyperConfig, matrix: ReparamMatrix) -> ReparamPoint:
    """r = A · log h."""
    with np.errstate(over="ignore", invalid="ignore"):
        r = matrix.array @ h.log()
    return ReparamPoint(tuple(float(v) for v in r))


def from_reparam(r: ReparamPoint, matrix: ReparamMatrix) -> HyperConfig:
    """h = exp(A⁻¹ r)."""
    with np.errstate(over="ignore"):
        values = np.exp(matrix.inverse() @ r.as_array())
    return HyperConfig.from_array(values)


def contains(space: SearchSpace, h: HyperConfig) -> bool:
    """True iff lo_i <= h_i <= hi_i for every dimension."""
    values = h.as_array()
    return bool(np.all(space.lower <= values) and np.all(values <= space.upper))


def reparam_table(h: HyperConfig, matrix: ReparamMatrix) -> Dict[str, float]:
    """Reparameterized coordinates keyed by direction label."""
    labels = ROW_LABELS.get(matrix.name, ("r0", "r1", "r2"))
    return dict(zip(labels, to_reparam(h, matrix).coords))


def standard_space(dims: int = 2, batch_size: float = 64.0) -> SearchSpace:
    """Λp, Λe in [1e-6, 17]; b in [16, 512] (3D) or pinned (2D)."""
    if dims not in (2, 3):
        raise InvalidConfig(f"dims must be 2 or 3, got {dims}")
    b_range = (16.0, 512.0) if dims == 3 else (batch_size, batch_size)
    return SearchSpace((1e-6, 17.0), (1e-6, 17.0), b_range)
