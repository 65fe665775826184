"""Console script for ridgesearch."""

from __future__ import annotations

import logging
import sys
import traceback
from typing import TYPE_CHECKING

import hydra
from ridgesearch import run_ridgesearch

if TYPE_CHECKING:
    from omegaconf import DictConfig


@hydra.main(version_base=None, config_path="configs", config_name="base")
def execute(cfg: DictConfig):
    """Helper function for nice logging and error handling."""
    logging.basicConfig(
        filename="job.log", format="%(asctime)s %(message)s", filemode="w"
    )
    logging.captureWarnings(True)
    logger = logging.getLogger()
    logger.setLevel(logging.INFO)

    try:
        run(cfg, logger)
    except Exception as e:
        print(f"error: {e}", file=sys.stderr)
        traceback.print_exc(file=sys.stderr)
        sys.exit(1)


def run(cfg: DictConfig, logger: logging.Logger):
    """Console script for ridgesearch."""
    summary = run_ridgesearch(cfg, logger=logger)
    logger.info(f"Returned summary: {summary}")
    return summary


if __name__ == "__main__":
    sys.exit(execute())  # pragma: no cover
