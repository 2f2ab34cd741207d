"""
Run the ODE lemma checkers on synthetic families, or on a run's diagnostics.

Usage:
    python manage.py verify_ode
    python manage.py verify_ode --csv runs/stable-linear/diagnostics.csv
"""

from django.core.management.base import CommandError

from ...numerics.odecheck import run_series_verdicts, synthetic_suite
from ...services import DiagnosticsCsvService
from ..base import SimulationCommand


class Command(SimulationCommand):
    help = "Check the ODE decay lemmas on synthetic families and negative controls"

    def add_command_arguments(self, parser):
        parser.add_argument("--samples", type=int, default=4001, help="Samples per synthetic family")
        parser.add_argument("--csv", help="Also apply the integrability lemma to this run series")
        parser.add_argument("--constant", type=float, default=10.0, help="Acceptance constant")

    def handle_command(self, *args, **options):
        mismatches = []
        for case in synthetic_suite(options["samples"]):
            verdict = case.run()
            self.say(options, f"== {case.name} (expected {case.expected})")
            self.say(options, verdict.to_text())
            if verdict.status != case.expected:
                mismatches.append(f"{case.name}: expected {case.expected}, got {verdict.status}")

        if options["csv"]:
            series = DiagnosticsCsvService().read(options["csv"])
            for verdict in run_series_verdicts(series, options["constant"]):
                self.say(options, "== run series")
                self.say(options, verdict.to_text())
                if verdict.status != "pass":
                    mismatches.append(f"{verdict.name}: {verdict.status}")

        if mismatches:
            raise CommandError("; ".join(mismatches))
        self.say(options, "All lemma checks behaved as expected", self.style.SUCCESS)
