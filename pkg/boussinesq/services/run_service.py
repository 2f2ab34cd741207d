import uuid
from pathlib import Path

from django.db import transaction
from django.http import Http404

from ..models import RunLog
from .run_config_service import RunConfigService
from .run_logging_service import RunLoggingService


class RunService:
    def __init__(self, config_service: RunConfigService | None = None):
        self.config_service = config_service or RunConfigService()

    def get_all(self):
        return RunLog.objects.all()

    def get_by_id(self, *, run_pk: int) -> RunLog:
        try:
            return RunLog.objects.get(pk=run_pk)
        except RunLog.DoesNotExist:
            raise Http404("Run not found.")

    @transaction.atomic
    def queue(
        self,
        *,
        config_text: str,
        name: str,
        eps: float | None = None,
        output_dir: str | None = None,
        base_dir: str | Path | None = None,
    ) -> RunLog:
        """Validate the configuration, record a pending run and hand it to a worker."""
        # Import here to avoid circular imports
        from ..tasks import run_simulation

        config = self.config_service.parse(
            config_text, name=name, base_dir=Path(base_dir) if base_dir else None
        )
        if eps is not None:
            config = self.config_service.with_eps(config, eps, name=name)
        run_id = uuid.uuid4().hex
        run_log = RunLoggingService.log_run_start(
            run_id,
            name,
            self.config_service.as_dict(config),
            str(self.config_service.output_dir(config, output_dir)),
        )
        transaction.on_commit(
            lambda: run_simulation.apply_async(
                kwargs={
                    "config_text": config_text,
                    "name": name,
                    "eps": eps,
                    "output_dir": output_dir,
                    "base_dir": str(base_dir) if base_dir else None,
                },
                task_id=run_id,
            )
        )
        return run_log
