"""
Vertical rearrangement of a density field stored as .npy.

Usage:
    python manage.py rearrange_once rho.npy --out rho_star.txt --method cells
"""

from ...numerics.functionals import vertical_rearrangement
from ...numerics.grid import Field
from ...services import FieldIoService
from ..base import SimulationCommand


class Command(SimulationCommand):
    help = "Write the decreasing rearrangement of a density field as an x2 profile"

    def add_command_arguments(self, parser):
        parser.add_argument("input", help=".npy density of shape (n1, n2)")
        parser.add_argument("--out", default="rho_star.txt", help="Output profile (x2, value)")
        parser.add_argument("--kmax", type=int, help="Wavenumber cutoff if n1 is ambiguous")
        parser.add_argument("--method", choices=["cells", "interpolated"], default="cells")

    def handle_command(self, *args, **options):
        field_io = FieldIoService()
        array = field_io.read_array(options["input"])
        grid = field_io.grid_for_shape(array.shape, options["kmax"])
        rho = Field(grid, array)

        result = vertical_rearrangement(rho, options["method"])
        path = field_io.save_profile(options["out"], grid.x2, result.rho_star)
        self.say(options, f"Wrote rearranged profile ({options['method']}) to {path}", self.style.SUCCESS)
