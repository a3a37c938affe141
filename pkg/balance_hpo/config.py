"""
Configuration for the balanced-HPO toolkit.

Uses environment variables for run locations, worker counts and the
budget-rule constants. Values from `.env.production` win over `.env`.
"""

import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import List

from dotenv import load_dotenv

load_dotenv(".env.production", override=True)
load_dotenv()


def _parse_int_list(raw: str) -> List[int]:
    return [int(part) for part in raw.replace(" ", "").split(",") if part]


@dataclass
class HpoConfig:
    """Configuration for search runs and comparisons."""

    # Output Settings
    output_dir: Path = Path("./hpo_runs")

    # Harness Settings
    max_workers: int = 1  # Trajectory thread pool size
    trajectories: int = 80
    auc_checkpoints: List[int] = field(default_factory=lambda: [10, 20])

    # Budget rule (slope below threshold => multiply that direction's budget)
    slope_threshold: float = 0.02
    budget_multiplier: float = 2.0

    # External command objective
    command_timeout: float = 3600.0  # Seconds
    env_lambda_p: str = "LAMBDA_P"
    env_lambda_e: str = "LAMBDA_E"
    env_batch_size: str = "BATCH_SIZE"

    log_level: str = "INFO"

    def __post_init__(self):
        """Load configuration from environment variables."""
        if env_dir := os.getenv("HPO_OUTPUT_DIR"):
            self.output_dir = env_dir
        if workers := os.getenv("HPO_MAX_WORKERS"):
            self.max_workers = int(workers)
        if trajectories := os.getenv("HPO_TRAJECTORIES"):
            self.trajectories = int(trajectories)
        if checkpoints := os.getenv("HPO_AUC_CHECKPOINTS"):
            self.auc_checkpoints = _parse_int_list(checkpoints)

        if threshold := os.getenv("HPO_SLOPE_THRESHOLD"):
            self.slope_threshold = float(threshold)
        if multiplier := os.getenv("HPO_BUDGET_MULTIPLIER"):
            self.budget_multiplier = float(multiplier)

        if timeout := os.getenv("HPO_COMMAND_TIMEOUT"):
            self.command_timeout = float(timeout)
        if name := os.getenv("HPO_ENV_LAMBDA_P"):
            self.env_lambda_p = name
        if name := os.getenv("HPO_ENV_LAMBDA_E"):
            self.env_lambda_e = name
        if name := os.getenv("HPO_ENV_BATCH_SIZE"):
            self.env_batch_size = name

        if level := os.getenv("HPO_LOG_LEVEL"):
            self.log_level = level.upper()

        self.output_dir = Path(self.output_dir)

    @classmethod
    def from_env(cls) -> "HpoConfig":
        """Create config from defaults plus environment overrides."""
        return cls()

    def validate(self) -> bool:
        """Validate value ranges."""
        if self.max_workers < 1:
            raise ValueError(f"max_workers must be >= 1, got {self.max_workers}")
        if self.trajectories < 1:
            raise ValueError(f"trajectories must be >= 1, got {self.trajectories}")
        if not self.auc_checkpoints or min(self.auc_checkpoints) < 1:
            raise ValueError(f"auc_checkpoints must be positive, got {self.auc_checkpoints}")
        if self.slope_threshold <= 0:
            raise ValueError(f"slope_threshold must be > 0, got {self.slope_threshold}")
        if self.budget_multiplier <= 1:
            raise ValueError(f"budget_multiplier must be > 1, got {self.budget_multiplier}")
        if self.command_timeout <= 0:
            raise ValueError(f"command_timeout must be > 0, got {self.command_timeout}")
        return True

    def __str__(self) -> str:
        """String representation for logging."""
        return (
            f"HpoConfig(output_dir={self.output_dir}, workers={self.max_workers}, "
            f"trajectories={self.trajectories}, slope_threshold={self.slope_threshold}, "
            f"multiplier={self.budget_multiplier})"
        )
