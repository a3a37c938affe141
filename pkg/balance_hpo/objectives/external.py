"""
External command objective.

Runs a training/evaluation command once per configuration. The three
hyperparameters are exported as environment variables (LAMBDA_P, LAMBDA_E,
BATCH_SIZE by default) and may also appear in the template as
``{lambda_p}``, ``{lambda_e}``, ``{batch_size}``. The last non-empty line
of standard output is parsed as the score.
"""

import logging
import os
import shlex
import subprocess
import threading
import time
from dataclasses import dataclass, field
from typing import Dict, List

from balance_hpo.config import HpoConfig
from balance_hpo.exceptions import CommandFailed, InvalidConfig, ParseFailed, TimedOut
from balance_hpo.space.reparam import HyperConfig

logger = logging.getLogger(__name__)


def round_batch_size(batch_size: float) -> int:
    """Nearest even integer >= 2 (2-per-class sampling needs an even b)."""
    return max(2, 2 * int(round(batch_size / 2.0)))


@dataclass
class ExternalCommandSpec:
    """How to launch and read one external evaluation."""

    template: str
    timeout: float = 3600.0
    env_lambda_p: str = "LAMBDA_P"
    env_lambda_e: str = "LAMBDA_E"
    env_batch_size: str = "BATCH_SIZE"
    parallel: bool = False  # Allow concurrent spawns from several trajectories

    def __post_init__(self):
        if not self.template.strip():
            raise InvalidConfig("command template must not be empty")
        if self.timeout <= 0:
            raise InvalidConfig(f"timeout must be > 0, got {self.timeout}")

    @classmethod
    def from_config(cls, template: str, config: HpoConfig, parallel: bool = False) -> "ExternalCommandSpec":
        return cls(
            template=template,
            timeout=config.command_timeout,
            env_lambda_p=config.env_lambda_p,
            env_lambda_e=config.env_lambda_e,
            env_batch_size=config.env_batch_size,
            parallel=parallel,
        )


def _substitutions(h: HyperConfig) -> Dict[str, str]:
    return {
        "lambda_p": repr(h.lambda_p_rate),
        "lambda_e": repr(h.lambda_e_rate),
        "batch_size": str(round_batch_size(h.batch_size)),
    }


def _render(template: str, values: Dict[str, str]) -> List[str]:
    argv = shlex.split(template)
    for key, value in values.items():
        argv = [part.replace("{" + key + "}", value) for part in argv]
    return argv


def parse_score(stdout: str) -> float:
    """Parse the last non-empty line of output as a decimal score."""
    lines = [line.strip() for line in stdout.splitlines() if line.strip()]
    if not lines:
        raise ParseFailed("command printed nothing")
    try:
        return float(lines[-1])
    except ValueError:
        raise ParseFailed(f"last output line is not a number: {lines[-1]!r}") from None


def external_eval(spec: ExternalCommandSpec, h: HyperConfig) -> float:
    """Spawn the command for h and return the parsed score."""
    values = _substitutions(h)
    argv = _render(spec.template, values)
    env = {
        **os.environ,
        spec.env_lambda_p: values["lambda_p"],
        spec.env_lambda_e: values["lambda_e"],
        spec.env_batch_size: values["batch_size"],
    }

    start = time.monotonic()
    try:
        result = subprocess.run(argv, env=env, capture_output=True, text=True, timeout=spec.timeout)
    except subprocess.TimeoutExpired:
        raise TimedOut(f"command exceeded {spec.timeout:g}s: {argv[0]}") from None
    except OSError as e:
        raise CommandFailed(returncode=-1, stderr=str(e)) from None
    duration = time.monotonic() - start

    if result.returncode != 0:
        raise CommandFailed(returncode=result.returncode, stderr=result.stderr)
    score = parse_score(result.stdout)
    logger.info(f"Command finished in {duration:.1f}s for {h}: {score:.6g}")
    return score


@dataclass
class ExternalCommandObjective:
    """Objective backed by an external command; serialized unless `spec.parallel`."""

    spec: ExternalCommandSpec
    name: str = "command"
    _lock: threading.Lock = field(default_factory=threading.Lock, init=False, repr=False)

    def __call__(self, h: HyperConfig) -> float:
        if self.spec.parallel:
            return external_eval(self.spec, h)
        with self._lock:
            return external_eval(self.spec, h)
