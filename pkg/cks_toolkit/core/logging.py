"""Logging configuration."""
import logging
import sys
from typing import Optional


def setup_logging(level: Optional[str] = None, stream=None) -> None:
    """Setup application logging.

    The CLI passes ``sys.stderr`` so that stdout carries only the summary line.
    """
    from cks_toolkit.core.config import settings

    log_level = level or settings.log_level

    logging.basicConfig(
        level=getattr(logging, log_level.upper(), logging.INFO),
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        handlers=[
            logging.StreamHandler(stream or sys.stdout)
        ],
        force=True,
    )

    # The OTLP exporter is chatty when no collector is listening
    logging.getLogger("opentelemetry.exporter.otlp").setLevel(logging.ERROR)


logger = logging.getLogger("cks_toolkit")
