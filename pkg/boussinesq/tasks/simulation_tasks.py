"""
Simulation run tasks.
"""

import logging
from pathlib import Path
from celery import shared_task

from ..exceptions import BoussinesqError
from ..services import RunConfigService, SimulationService
from .base_task import BaseTask

logger = logging.getLogger(__name__)


class SimulationTasks(BaseTask):
    """One simulation run per task; sweeps fan out over workers."""

    @staticmethod
    @shared_task(bind=True)
    def run_simulation(
        self,
        config_text: str,
        name: str = "run",
        eps: float | None = None,
        output_dir: str | None = None,
        base_dir: str | None = None,
    ):
        """
        Run one configured simulation to completion.

        Args:
            config_text: INI run configuration
            name: run label, also the default output directory name
            eps: optional perturbation amplitude overriding the config
            output_dir: directory for diagnostics, checkpoints and report
            base_dir: directory relative config paths are resolved against
        """
        run_id = self.request.id
        try:
            config_service = RunConfigService()
            config = config_service.parse(
                config_text, name=name, base_dir=Path(base_dir) if base_dir else None
            )
            if eps is not None:
                config = config_service.with_eps(config, eps, name=name)
        except BoussinesqError as exc:
            logger.error(f"Run {run_id} has an invalid configuration: {exc}")
            SimulationTasks.log_run_failure(run_id, str(exc), exc.exit_code)
            return {"run_id": run_id, "status": "invalid", "error": str(exc)}

        outcome = SimulationService(config_service=config_service).run(
            config, output_dir=output_dir, run_id=run_id
        )
        logger.info(f"Run {run_id} finished with status {outcome.status}")
        return {
            "run_id": run_id,
            "status": outcome.status,
            "output_dir": str(outcome.output_dir),
            "final_time": outcome.state.t,
        }
