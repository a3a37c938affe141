"""
Stand-in training command for the `cmd:` objective.

Reads LAMBDA_P / LAMBDA_E / BATCH_SIZE from the environment, logs some
progress lines and prints the ridge-landscape score on its last line:

    python -m balance_hpo tune --objective 'cmd:python toy_trainer.py' --total-budget 20
"""

import logging
import os
import sys

from balance_hpo.objectives.synthetic import make_landscape
from balance_hpo.space.reparam import HyperConfig

logging.basicConfig(level=logging.INFO, format="%(message)s", stream=sys.stderr)
logger = logging.getLogger("toy_trainer")


def main() -> int:
    try:
        h = HyperConfig(
            float(os.environ["LAMBDA_P"]),
            float(os.environ["LAMBDA_E"]),
            float(os.environ["BATCH_SIZE"]),
        )
    except (KeyError, ValueError) as e:
        logger.error(f"missing or invalid hyperparameter: {e}")
        return 2

    logger.info(f"training with {h}")
    print("epoch 1 done")
    print(make_landscape("ridge", perturbation=0.01)(h))
    return 0


if __name__ == "__main__":
    sys.exit(main())
