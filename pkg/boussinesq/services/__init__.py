from .run_config_service import RunConfig, RunConfigService
from .field_io_service import FieldIoService
from .checkpoint_service import CheckpointService
from .diagnostics_csv_service import DiagnosticsCsvService
from .report_service import ReportService
from .run_logging_service import RunLoggingService
from .run_service import RunService
from .simulation_service import SimulationService

__all__ = [
    "RunConfig",
    "RunConfigService",
    "FieldIoService",
    "CheckpointService",
    "DiagnosticsCsvService",
    "ReportService",
    "RunLoggingService",
    "RunService",
    "SimulationService",
]
