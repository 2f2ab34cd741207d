"""
Base task class with common functionality.
"""

import logging
from ..services.run_logging_service import RunLoggingService

logger = logging.getLogger(__name__)


class BaseTask:
    """Base class for all task classes."""

    @staticmethod
    def log_run_failure(run_id: str, error_message: str, exit_code: int = 1):
        """Helper method to log a run that failed before the simulation took over."""
        return RunLoggingService.log_run_failure(run_id, error_message, exit_code)
