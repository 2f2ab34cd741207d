"""
Run one simulation from an INI configuration.

Usage:
    python manage.py run --config configs/stable-linear.ini [--out DIR] [--resume CHECKPOINT]
"""

from django.core.management.base import CommandError

from ...services import RunConfigService, SimulationService
from ..base import SimulationCommand


class Command(SimulationCommand):
    help = "Run a Boussinesq channel simulation and write diagnostics, checkpoints and a report"

    def add_command_arguments(self, parser):
        parser.add_argument("--config", required=True, help="Run configuration file")
        parser.add_argument("--out", help="Output directory (defaults to the config's)")
        parser.add_argument("--resume", help="Checkpoint file or checkpoint directory to resume from")
        parser.add_argument("--eps", type=float, help="Override the perturbation amplitude")

    def handle_command(self, *args, **options):
        config_service = RunConfigService()
        config = config_service.load(options["config"])
        if options["eps"] is not None:
            config = config_service.with_eps(config, options["eps"], name=config.name)

        outcome = SimulationService(config_service=config_service).run(
            config, output_dir=options["out"], resume=options["resume"]
        )

        slopes = outcome.report.get("slopes", {})
        e_t = slopes.get("E_T", {})
        self.say(options, f"Run {outcome.run_id}: {outcome.status} at t={outcome.state.t:.6g}")
        if "slope" in e_t:
            self.say(options, f"E_T slope over {e_t['window']}: {e_t['slope']:.3f}")
        self.say(options, f"Report: {outcome.output_dir / 'report.json'}", self.style.SUCCESS)

        if outcome.error is not None:
            raise CommandError(str(outcome.error), returncode=outcome.error.exit_code)
