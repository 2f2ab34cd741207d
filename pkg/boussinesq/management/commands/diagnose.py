"""
Recompute report quantities from a diagnostics CSV without rerunning.

Usage:
    python manage.py diagnose runs/stable-linear/diagnostics.csv --checks slopes,lyapunov
"""

import json

from ...numerics.functionals import window_average
from ...services import DiagnosticsCsvService, ReportService, RunConfigService
from ...services.report_service import ALL_CHECKS, jsonable
from ..base import SimulationCommand


class Command(SimulationCommand):
    help = "Post-process a diagnostics CSV into report sections"

    def add_command_arguments(self, parser):
        parser.add_argument("csv_path", help="diagnostics.csv written by a run")
        parser.add_argument(
            "--checks",
            default=",".join(ALL_CHECKS),
            help=f"Comma-separated subset of {','.join(ALL_CHECKS)}",
        )
        parser.add_argument("--config", help="Take fit window, t_burn and C1 from this run config")
        parser.add_argument("--fit-start", type=float, help="Start of the slope fit window")
        parser.add_argument("--fit-end", type=float, help="End of the slope fit window")
        parser.add_argument("--t-burn", type=float, help="Burn-in time for instability proxies")
        parser.add_argument("--c1", type=float, help="Lyapunov constant to test")
        parser.add_argument(
            "--window",
            type=float,
            action="append",
            default=[],
            help="Window end t for (2/t) int_{t/2}^t dissipation; the CSV must cover it",
        )
        parser.add_argument("--out", help="Write the report JSON here instead of stdout")

    def handle_command(self, *args, **options):
        series = DiagnosticsCsvService().read(options["csv_path"])
        checks = [c.strip() for c in options["checks"].split(",") if c.strip()]

        analysis = {"fit_start": 25.0, "fit_end": None, "t_burn": 10.0, "c1": None}
        if options["config"]:
            config = RunConfigService().load(options["config"])
            analysis["fit_start"], analysis["fit_end"] = config.fit_window
            analysis["t_burn"] = config.analysis.t_burn
            analysis["c1"] = config.analysis.c1
        for key in analysis:
            if options[key] is not None:
                analysis[key] = options[key]
        if analysis["fit_end"] is None:
            analysis["fit_end"] = float(series["t"][-1]) if len(series["t"]) else 0.0

        report_service = ReportService()
        report = report_service.derive(
            series,
            fit_window=(analysis["fit_start"], analysis["fit_end"]),
            t_burn=analysis["t_burn"],
            c1=analysis["c1"],
            checks=checks,
        )
        report["final_record"] = report_service.final_record(series)
        if options["window"]:
            report["requested_windows"] = {
                f"{t:g}": window_average(series, "dissipation", t) for t in options["window"]
            }

        if options["out"]:
            path = report_service.write(options["out"], report)
            self.say(options, f"Report written to {path}", self.style.SUCCESS)
        else:
            self.stdout.write(json.dumps(jsonable(report), indent=2, sort_keys=True))
