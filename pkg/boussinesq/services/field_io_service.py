"""
Reading and writing physical fields and x2 profiles.

Fields are stored as .npy arrays of shape (n1, n2); profiles as two-column
text files (x2, value).
"""

import logging
from pathlib import Path

import numpy as np

from ..exceptions import BoussinesqError, FieldFileError
from ..numerics.grid import ChannelGrid, Field, build_grid

logger = logging.getLogger(__name__)


class FieldIoService:
    def read_array(self, path: str | Path) -> np.ndarray:
        path = Path(path)
        try:
            array = np.load(path, allow_pickle=False)
        except (OSError, ValueError, EOFError) as e:
            raise FieldFileError(f"Cannot read field file {path}: {e}") from e
        if not isinstance(array, np.ndarray) or array.ndim != 2:
            raise FieldFileError(f"{path} must hold a 2D array, got shape {getattr(array, 'shape', None)}")
        if not np.issubdtype(array.dtype, np.number) or np.iscomplexobj(array):
            raise FieldFileError(f"{path} must hold real numbers, got dtype {array.dtype}")
        if not np.all(np.isfinite(array)):
            raise FieldFileError(f"{path} contains non-finite values")
        return array.astype(float)

    def grid_for_shape(self, shape: tuple[int, ...], kmax: int | None = None) -> ChannelGrid:
        """The grid whose physical shape is (n1, n2)."""
        n1, n2 = shape
        try:
            grid = build_grid(kmax if kmax is not None else n1 // 3, n2)
        except BoussinesqError as e:
            raise FieldFileError(f"No channel grid matches shape {shape}: {e}") from e
        if grid.n1 != n1:
            raise FieldFileError(
                f"Field has {n1} points in x1 but kmax={grid.kmax} needs {grid.n1}"
            )
        return grid

    def load_field(self, path: str | Path, grid: ChannelGrid | None = None) -> Field:
        array = self.read_array(path)
        if grid is None:
            grid = self.grid_for_shape(array.shape)
        elif array.shape != (grid.n1, grid.n2):
            raise FieldFileError(
                f"{path} has shape {array.shape}, grid needs {(grid.n1, grid.n2)}"
            )
        return Field(grid, array)

    def save_field(self, path: str | Path, values: np.ndarray) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        np.save(path, np.asarray(values))
        logger.debug(f"Wrote field {path}")
        return path

    def load_profile_table(self, path: str | Path) -> tuple[np.ndarray, np.ndarray]:
        path = Path(path)
        try:
            table = np.loadtxt(path, ndmin=2, delimiter=None)
        except (OSError, ValueError) as e:
            raise FieldFileError(f"Cannot read profile table {path}: {e}") from e
        if table.shape[1] != 2:
            raise FieldFileError(f"{path} must have two columns (x2, value), got {table.shape[1]}")
        order = np.argsort(table[:, 0])
        return table[order, 0], table[order, 1]

    def save_profile(self, path: str | Path, x2: np.ndarray, values: np.ndarray) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        np.savetxt(path, np.column_stack([x2, values]), fmt="%.17g", header="x2 value")
        return path
