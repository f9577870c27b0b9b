"""FastAPI dependencies."""
import logging

from cks_toolkit.core.config import Settings, settings
from cks_toolkit.core.logging import logger


def get_logger() -> logging.Logger:
    """Dependency to get logger instance."""
    return logger


def get_settings() -> Settings:
    return settings
