"""
Synthetic analytic landscapes.

score(h) = s_max - Σ_i d_i·(v_i - v*_i)² + perturbation(log h)
with v = B·log h, v* = B·log h*, and B's rows unit-normalized directions.

The `ridge` preset has high curvature along the balance direction and low
curvature along joint scaling of (Λp, Λe), the shape observed on real
performance grids.
"""

import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Optional, Sequence, Tuple, Union

import numpy as np

from balance_hpo.exceptions import FormatError, InvalidConfig, UnknownPreset
from balance_hpo.space.reparam import HyperConfig, ReparamMatrix, preset_matrix

logger = logging.getLogger(__name__)

PERTURBATION_COMPONENTS = 4
PERTURBATION_FREQUENCY_SCALE = 0.75


@dataclass
class SyntheticLandscape:
    """Concave quadratic in v = B·log h with an optional sinusoidal ripple."""

    optimum: HyperConfig
    peak: float
    directions: np.ndarray
    curvatures: Tuple[float, float, float]
    perturbation: float = 0.0
    perturbation_seed: int = 0
    name: str = "synthetic"

    _freqs: np.ndarray = field(init=False, repr=False)
    _phases: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        directions = np.asarray(self.directions, dtype=float)
        if directions.shape != (3, 3):
            raise InvalidConfig(f"direction matrix must be 3x3, got {directions.shape}")
        norms = np.linalg.norm(directions, axis=1)
        if np.any(norms == 0):
            raise InvalidConfig("direction matrix has a zero row")
        self.directions = directions / norms[:, None]
        if not ReparamMatrix.from_values(self.directions.reshape(-1)).is_invertible:
            raise InvalidConfig("direction matrix must be invertible")

        self.curvatures = tuple(float(c) for c in self.curvatures)
        if len(self.curvatures) != 3 or any(c < 0 for c in self.curvatures):
            raise InvalidConfig(f"need 3 nonnegative curvatures, got {self.curvatures}")
        if self.perturbation < 0:
            raise InvalidConfig(f"perturbation amplitude must be >= 0, got {self.perturbation}")

        rng = np.random.default_rng(self.perturbation_seed)
        self._freqs = rng.normal(0.0, PERTURBATION_FREQUENCY_SCALE, size=(PERTURBATION_COMPONENTS, 3))
        self._phases = rng.uniform(0.0, 2 * math.pi, size=PERTURBATION_COMPONENTS)

    @property
    def optimum_coords(self) -> np.ndarray:
        return self.directions @ self.optimum.log()

    def ripple(self, log_h: np.ndarray) -> float:
        if self.perturbation == 0:
            return 0.0
        offset = log_h - self.optimum.log()
        return float(self.perturbation * np.mean(np.sin(self._freqs @ offset + self._phases)))

    def __call__(self, h: HyperConfig) -> float:
        return synthetic_eval(self, h)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "optimum": list(self.optimum.as_tuple()),
            "peak": self.peak,
            "directions": self.directions.tolist(),
            "curvatures": list(self.curvatures),
            "perturbation": self.perturbation,
            "perturbation_seed": self.perturbation_seed,
        }


def synthetic_eval(landscape: SyntheticLandscape, h: HyperConfig) -> float:
    """s_max - Σ d_i (v_i - v*_i)² + perturbation."""
    log_h = h.log()
    deviation = landscape.directions @ log_h - landscape.optimum_coords
    deficit = float(np.dot(landscape.curvatures, deviation ** 2))
    return landscape.peak - deficit + landscape.ripple(log_h)


RIDGE_OPTIMUM = HyperConfig(8e-3, 2.0, 64.0)

LANDSCAPE_PRESETS: Dict[str, Dict[str, Any]] = {
    "ridge": {"matrix": "balance", "curvatures": (2.0, 0.1, 0.05), "peak": 0.85},
    "bowl": {"matrix": "identity", "curvatures": (0.1, 0.1, 0.1), "peak": 0.85},
}


def make_landscape(
    preset: str = "ridge",
    optimum: Optional[HyperConfig] = None,
    perturbation: float = 0.0,
    seed: int = 0,
) -> SyntheticLandscape:
    """Instantiate a named landscape preset."""
    try:
        settings = LANDSCAPE_PRESETS[preset]
    except KeyError:
        raise UnknownPreset(
            f"unknown landscape preset '{preset}' (choose from {', '.join(LANDSCAPE_PRESETS)})"
        ) from None
    return SyntheticLandscape(
        optimum=optimum or RIDGE_OPTIMUM,
        peak=settings["peak"],
        directions=preset_matrix(settings["matrix"]).array,
        curvatures=settings["curvatures"],
        perturbation=perturbation,
        perturbation_seed=seed,
        name=preset,
    )


def _landscape_from_dict(data: Dict[str, Any], name: str) -> SyntheticLandscape:
    if "preset" in data:
        optimum = HyperConfig.from_array(data["optimum"]) if "optimum" in data else None
        return make_landscape(
            data["preset"],
            optimum=optimum,
            perturbation=float(data.get("perturbation", 0.0)),
            seed=int(data.get("perturbation_seed", 0)),
        )
    try:
        return SyntheticLandscape(
            optimum=HyperConfig.from_array(data["optimum"]),
            peak=float(data["peak"]),
            directions=np.asarray(data["directions"], dtype=float),
            curvatures=tuple(data["curvatures"]),
            perturbation=float(data.get("perturbation", 0.0)),
            perturbation_seed=int(data.get("perturbation_seed", 0)),
            name=data.get("name", name),
        )
    except KeyError as e:
        raise FormatError(f"landscape definition is missing {e}") from None


def load_landscape(source: Union[str, Path]) -> SyntheticLandscape:
    """Load a preset name (optionally `preset@amplitude@seed`) or a JSON file."""
    text = str(source)
    head = text.split("@")[0]
    if head in LANDSCAPE_PRESETS:
        parts = text.split("@")
        perturbation = float(parts[1]) if len(parts) > 1 else 0.0
        seed = int(parts[2]) if len(parts) > 2 else 0
        return make_landscape(head, perturbation=perturbation, seed=seed)

    path = Path(source)
    if not path.exists():
        raise UnknownPreset(f"'{source}' is neither a landscape preset nor a file")
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as e:
        raise FormatError(f"invalid JSON in {path}: {e.msg}", row=e.lineno) from None
    landscape = _landscape_from_dict(data, name=path.stem)
    logger.info(f"Loaded landscape '{landscape.name}' from {path}")
    return landscape


def ridge_suite(
    count: int,
    optima_bounds: Sequence[Tuple[float, float]],
    perturbation: float = 0.01,
    seed: int = 0,
) -> list:
    """Ridge landscapes with log-uniform optima inside `optima_bounds`."""
    rng = np.random.default_rng(seed)
    suite = []
    for k in range(count):
        optimum = HyperConfig.from_array(
            [math.exp(rng.uniform(math.log(lo), math.log(hi))) for lo, hi in optima_bounds]
        )
        suite.append(make_landscape("ridge", optimum=optimum, perturbation=perturbation, seed=seed + k))
    return suite
