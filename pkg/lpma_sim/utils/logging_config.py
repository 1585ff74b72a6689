"""Logging setup for simulator runs and the banner helper used by pipeline summaries."""

import logging
import sys
from datetime import datetime
from pathlib import Path
from typing import Iterable

BANNER = "=" * 60


def setup_logging(log_dir: Path, log_level: str = "INFO", run_name: str = "lpma") -> logging.Logger:
    """
    Route log records to a timestamped file under log_dir and to stdout.

    Calling it again (one CLI invocation after another in the same process)
    replaces the previous handlers.
    """
    log_dir.mkdir(parents=True, exist_ok=True)
    timestamp = datetime.now().strftime("%Y%m%d_%H%M%S")
    log_file = log_dir / f"{run_name}_{timestamp}.log"

    logging.basicConfig(
        level=getattr(logging, log_level.upper()),
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        handlers=[logging.FileHandler(log_file), logging.StreamHandler(sys.stdout)],
        force=True,
    )

    logger = logging.getLogger(__name__)
    logger.info(f"Logging initialized for '{run_name}'. Log file: {log_file}")
    return logger


def log_banner(logger: logging.Logger, title: str, lines: Iterable[str] = ()):
    """Log a title and indented summary lines between '=' rules."""
    logger.info(BANNER)
    logger.info(title)
    for line in lines:
        logger.info(f"  {line}")
    logger.info(BANNER)
