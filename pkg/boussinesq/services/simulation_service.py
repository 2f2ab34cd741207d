"""
Simulation driver: time loop, diagnostics, checkpoints and the run report.
"""

import logging
import time
import uuid
from dataclasses import dataclass, replace
from pathlib import Path

from ..exceptions import (
    BoussinesqError,
    CFLViolationError,
    CheckpointError,
    NumericalDivergenceError,
    ResolutionMonitorStop,
)
from ..numerics.dynamics import (
    SimState,
    StepParams,
    cfl_dt,
    density,
    resolution_tail,
    step,
    with_dt_history_reset,
)
from ..numerics.functionals import compute_record, vertical_rearrangement
from .checkpoint_service import CheckpointService
from .diagnostics_csv_service import DiagnosticsCsvService
from .report_service import ALL_CHECKS, ReportService, jsonable
from .run_config_service import RunConfig, RunConfigService
from .run_logging_service import RunLoggingService

logger = logging.getLogger(__name__)

MIN_ADAPTIVE_DT = 1e-8
DIAGNOSTICS_FILE = "diagnostics.csv"
REPORT_FILE = "report.json"
CHECKPOINT_DIR = "checkpoints"


@dataclass
class RunOutcome:
    run_id: str
    status: str
    output_dir: Path
    report: dict
    state: SimState
    error: Exception | None = None


class SimulationService:
    def __init__(
        self,
        config_service: RunConfigService | None = None,
        csv_service: DiagnosticsCsvService | None = None,
        checkpoint_service: CheckpointService | None = None,
        report_service: ReportService | None = None,
        log_to_db: bool = True,
    ):
        self.config_service = config_service or RunConfigService()
        self.csv_service = csv_service or DiagnosticsCsvService()
        self.checkpoint_service = checkpoint_service or CheckpointService()
        self.report_service = report_service or ReportService()
        self.log_to_db = log_to_db

    def checks_for(self, config: RunConfig) -> list[str]:
        if config.scenario.kind == "bubble":
            return list(ALL_CHECKS)
        return [c for c in ALL_CHECKS if c != "instability"]

    def derive(self, config: RunConfig, series) -> dict:
        return self.report_service.derive(
            series,
            fit_window=config.fit_window,
            t_burn=config.analysis.t_burn,
            c1=config.analysis.c1,
            checks=self.checks_for(config),
        )

    def run(
        self,
        config: RunConfig,
        *,
        output_dir: str | Path | None = None,
        resume: str | Path | None = None,
        run_id: str | None = None,
    ) -> RunOutcome:
        out = self.config_service.output_dir(config, output_dir)
        out.mkdir(parents=True, exist_ok=True)
        csv_path = out / DIAGNOSTICS_FILE
        checkpoint_dir = out / CHECKPOINT_DIR
        run_id = run_id or f"{config.name}-{uuid.uuid4().hex[:12]}"
        config_echo = self.config_service.as_dict(config)

        if self.log_to_db:
            RunLoggingService.log_run_start(run_id, config.name, config_echo, str(out))
        started = time.perf_counter()

        try:
            initial = self.config_service.build_initial_data(config)
            profile = initial.profile
            rho0_star = vertical_rearrangement(
                density(initial.state, profile), config.analysis.rearrangement
            ).rho_star

            if resume is not None:
                state, dt = self.checkpoint_service.load(resume, grid=initial.state.grid)
                if not csv_path.exists():
                    raise CheckpointError(f"Cannot resume: {csv_path} is missing")
                kept = self.csv_service.truncate_after(csv_path, state.t)
                logger.info(
                    f"[{run_id}] resuming at t={state.t:.6g} (step {state.step}, {kept} rows kept)"
                )
            else:
                state = initial.state
                dt = config.time.dt or cfl_dt(state, config.time.cfl_target, config.time.dt_max)
                self.csv_service.write(csv_path, [compute_record(state, profile, rho0_star)])
                logger.info(
                    f"[{run_id}] starting {config.name}: dt={dt:.3e}, t_final={config.time.t_final}"
                )

            params = StepParams(
                dt=dt,
                t_final=config.time.t_final,
                cfl_target=config.time.cfl_target,
                output_every=config.time.output_every,
                dt_max=config.time.dt_max,
            )
        except (BoussinesqError, OSError) as e:
            self.record_failure(run_id, e)
            raise
        adaptive = config.time.dt is None
        t_end = config.time.t_final * (1.0 - 1e-12)
        threshold = config.analysis.resolution_tail_max
        max_tail = resolution_tail(state.theta)
        error: Exception | None = None
        status = "completed"

        try:
            while state.t < t_end:
                try:
                    state = step(state, params, profile)
                except CFLViolationError as e:
                    if not adaptive or e.suggested_dt < MIN_ADAPTIVE_DT:
                        raise
                    logger.warning(f"[{run_id}] {e}; reducing dt to {e.suggested_dt:.3e}")
                    params = replace(params, dt=e.suggested_dt)
                    state = with_dt_history_reset(state)
                    continue

                if state.step % params.output_every == 0 or state.t >= t_end:
                    record = compute_record(state, profile, rho0_star)
                    self.csv_service.append(csv_path, record)
                    tail = resolution_tail(state.theta)
                    max_tail = max(max_tail, tail)
                    logger.info(
                        f"[{run_id}] step {state.step} t={state.t:.4f} "
                        f"E_T={record.E_T:.4e} S={record.S:.4e} tail={tail:.2e}"
                    )
                    if tail > threshold:
                        raise ResolutionMonitorStop(
                            f"spectral tail {tail:.3e} exceeds {threshold:.3e} at t={state.t:.6g}",
                            tail=tail,
                            t=state.t,
                        )

                cadence = config.time.checkpoint_every
                if cadence and state.step % cadence == 0:
                    self.checkpoint_service.save(checkpoint_dir, state, params.dt)
        except NumericalDivergenceError as e:
            error, status = e, "diverged"
            logger.error(f"[{run_id}] numerical divergence: {e}")
        except ResolutionMonitorStop as e:
            error, status = e, "stopped"
            logger.warning(f"[{run_id}] resolution monitor stop: {e}")
        except (BoussinesqError, OSError) as e:
            error, status = e, "failed"
            logger.error(f"[{run_id}] run failed at t={state.t:.6g}: {e}")

        try:
            self.checkpoint_service.save(checkpoint_dir, state, params.dt)
        except (BoussinesqError, OSError) as e:
            logger.error(f"[{run_id}] final checkpoint not written: {e}")
            if error is None:
                error, status = e, "failed"

        report = {
            "run_id": run_id,
            "config": config_echo,
            "status": status,
            "termination": None,
            "wall_clock_seconds": time.perf_counter() - started,
            "initial": initial.metadata,
            "dt": params.dt,
            "steps": state.step,
            "final_time": state.t,
            "resolution_monitor": {
                "max_tail": max_tail,
                "threshold": threshold,
                "stopped": status == "stopped",
            },
        }
        try:
            series = self.csv_service.read(csv_path)
            report["final_record"] = self.report_service.final_record(series)
            report.update(self.derive(config, series))
        except (BoussinesqError, OSError) as e:
            logger.error(f"[{run_id}] diagnostics unavailable for the report: {e}")
            if error is None:
                error, status = e, "failed"
                report["status"] = status
        if error is not None:
            report["termination"] = {
                "reason": type(error).__name__,
                "message": str(error),
                "t": getattr(error, "t", None),
                "exit_code": getattr(error, "exit_code", 1),
            }
        report = jsonable(report)
        try:
            self.report_service.write(out / REPORT_FILE, report)
        except OSError as e:
            logger.error(f"[{run_id}] report not written: {e}")
            if error is None:
                error, status = e, "failed"

        if self.log_to_db:
            if error is None:
                RunLoggingService.log_run_success(run_id, report, state.t)
            elif isinstance(error, ResolutionMonitorStop):
                RunLoggingService.log_run_stopped(run_id, str(error), report, state.t)
            else:
                exit_code = getattr(error, "exit_code", 1)
                RunLoggingService.log_run_failure(run_id, str(error), exit_code, report, state.t)

        if status == "failed":
            raise error
        logger.info(f"[{run_id}] {status} at t={state.t:.6g}; report written to {out / REPORT_FILE}")
        return RunOutcome(run_id, status, out, report, state, error)

    def record_failure(self, run_id: str, error: Exception) -> None:
        """Mark a run as failed when it could not even start."""
        if self.log_to_db:
            exit_code = getattr(error, "exit_code", 1)
            RunLoggingService.log_run_failure(run_id, str(error), exit_code)
