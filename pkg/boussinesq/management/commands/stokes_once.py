"""
One steady Stokes solve for a density field stored as .npy.

Usage:
    python manage.py stokes_once rho.npy --out stokes/
    python manage.py stokes_once --convergence
"""

import json
from pathlib import Path

import numpy as np
from django.core.management.base import CommandError

from ...numerics.dynamics import HydrostaticProfile, bubble_perturbation
from ...numerics.elliptic import solve_stokes_buoyancy, stokes_residual
from ...numerics.fields import velocity_l2
from ...numerics.grid import Field, build_grid
from ...services import FieldIoService
from ..base import SimulationCommand

CONVERGENCE_N2 = (65, 129, 257)


class Command(SimulationCommand):
    help = "Solve -lap v + grad q + (0, rho) = 0 once and write v, psi, q and residual norms"

    def add_command_arguments(self, parser):
        parser.add_argument("input", nargs="?", help=".npy density of shape (n1, n2)")
        parser.add_argument("--out", default="stokes", help="Output directory")
        parser.add_argument("--kmax", type=int, help="Wavenumber cutoff if n1 is ambiguous")
        parser.add_argument(
            "--convergence",
            action="store_true",
            help="Print the residual refinement table for the bubble density instead",
        )

    def handle_command(self, *args, **options):
        if options["convergence"]:
            self._convergence_table(options)
            return
        if not options["input"]:
            raise CommandError("An input field is required unless --convergence is given")

        field_io = FieldIoService()
        array = field_io.read_array(options["input"])
        grid = field_io.grid_for_shape(array.shape, options["kmax"])
        rho = Field(grid, array)

        solution = solve_stokes_buoyancy(rho)
        r1, r2 = stokes_residual(rho, solution)
        out = Path(options["out"])
        field_io.save_field(out / "v1.npy", solution.v.u1.values)
        field_io.save_field(out / "v2.npy", solution.v.u2.values)
        field_io.save_field(out / "psi.npy", solution.psi.values)
        field_io.save_field(out / "q.npy", solution.q.values)
        summary = {
            "kmax": grid.kmax,
            "n1": grid.n1,
            "n2": grid.n2,
            "v_l2": velocity_l2(solution.v),
            "residual_u1": r1,
            "residual_u2": r2,
        }
        (out / "residual.json").write_text(json.dumps(summary, indent=2) + "\n")
        self.say(options, f"v L2 = {summary['v_l2']:.6e}, residual = ({r1:.3e}, {r2:.3e})")
        self.say(options, f"Wrote Stokes fields to {out}", self.style.SUCCESS)

    def _convergence_table(self, options):
        rows = []
        for n2 in CONVERGENCE_N2:
            grid = build_grid(85, n2)
            profile = HydrostaticProfile.linear(grid, 1.0)
            theta = bubble_perturbation(grid, 0.1, 0.15, 4.0)
            rho = Field(grid, theta.values + profile.rho_s[None, :])
            r1, r2 = stokes_residual(rho, solve_stokes_buoyancy(rho))
            rows.append((n2, float(np.hypot(r1, r2))))
        self.stdout.write(f"{'n2':>6} {'residual':>14} {'order':>8}")
        previous = None
        for n2, residual in rows:
            order = "" if previous is None else f"{np.log2(previous / residual):8.3f}"
            self.stdout.write(f"{n2:>6} {residual:14.6e} {order:>8}")
            previous = residual
