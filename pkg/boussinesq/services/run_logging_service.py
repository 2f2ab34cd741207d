"""
Run logging service for tracking simulation runs in the database.
"""

from typing import Any
from django.utils import timezone
from ..models import RunLog


class RunLoggingService:
    """Service for logging run lifecycle to database."""

    @staticmethod
    def log_run_start(
        run_id: str, label: str, config: dict | None = None, output_dir: str = ""
    ) -> RunLog:
        """Create or reset the RunLog row for a run."""
        run_log, _ = RunLog.objects.update_or_create(
            run_id=run_id,
            defaults={
                "label": label,
                "status": "PENDING",
                "config": config,
                "output_dir": str(output_dir),
                "report": None,
                "error_message": "",
                "exit_code": None,
                "final_time": None,
                "started_at": timezone.now(),
                "completed_at": None,
                "duration_seconds": None,
            },
        )
        return run_log

    @staticmethod
    def _finish(run_id: str, **fields: Any) -> None:
        try:
            run_log = RunLog.objects.get(run_id=run_id)
        except RunLog.DoesNotExist:
            return
        for name, value in fields.items():
            setattr(run_log, name, value)
        run_log.completed_at = timezone.now()
        if run_log.started_at:
            duration = (run_log.completed_at - run_log.started_at).total_seconds()
            run_log.duration_seconds = duration
        run_log.save()

    @staticmethod
    def log_run_success(run_id: str, report: dict | None = None, final_time: float | None = None) -> None:
        """Log successful completion."""
        RunLoggingService._finish(
            run_id, status="SUCCESS", report=report, final_time=final_time, exit_code=0
        )

    @staticmethod
    def log_run_failure(
        run_id: str,
        error_message: str,
        exit_code: int = 1,
        report: dict | None = None,
        final_time: float | None = None,
    ) -> None:
        """Log a run that ended with an error."""
        RunLoggingService._finish(
            run_id,
            status="FAILURE",
            error_message=error_message,
            exit_code=exit_code,
            report=report,
            final_time=final_time,
        )

    @staticmethod
    def log_run_stopped(
        run_id: str, error_message: str, report: dict | None = None, final_time: float | None = None
    ) -> None:
        """Log a run halted by the resolution monitor."""
        RunLoggingService._finish(
            run_id,
            status="STOPPED",
            error_message=error_message,
            exit_code=4,
            report=report,
            final_time=final_time,
        )
