"""
Queue one Celery run per perturbation amplitude.

Usage:
    python manage.py sweep --config configs/stable-linear.ini --eps 0.001 0.01 0.1
"""

from pathlib import Path

from ...services import RunService
from ..base import SimulationCommand


class Command(SimulationCommand):
    help = "Queue a parameter sweep over eps; each run gets its own output directory"

    def add_command_arguments(self, parser):
        parser.add_argument("--config", required=True, help="Base run configuration file")
        parser.add_argument("--eps", type=float, nargs="+", required=True, help="Amplitudes to run")
        parser.add_argument("--out", help="Parent directory for the per-run outputs")

    def handle_command(self, *args, **options):
        config_path = Path(options["config"])
        config_text = config_path.read_text()
        run_service = RunService()

        for eps in options["eps"]:
            name = f"{config_path.stem}-eps{eps:g}"
            output_dir = str(Path(options["out"]) / name) if options["out"] else None
            run = run_service.queue(
                config_text=config_text,
                name=name,
                eps=eps,
                output_dir=output_dir,
                base_dir=config_path.resolve().parent,
            )
            self.say(options, f"Queued {name} as run {run.run_id}")

        self.say(options, f"Queued {len(options['eps'])} runs", self.style.SUCCESS)
