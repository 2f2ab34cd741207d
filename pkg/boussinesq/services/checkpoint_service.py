"""
Checkpoint files for restartable runs.
"""

import logging
from pathlib import Path

from ..exceptions import CheckpointError
from ..numerics.dynamics import SimState, decode_checkpoint, encode_checkpoint
from ..numerics.grid import ChannelGrid

logger = logging.getLogger(__name__)


class CheckpointService:
    def path_for(self, directory: str | Path, step: int) -> Path:
        return Path(directory) / f"step_{step:09d}.ckpt"

    def save(self, directory: str | Path, state: SimState, dt: float) -> Path:
        path = self.path_for(directory, state.step)
        path.parent.mkdir(parents=True, exist_ok=True)
        tmp = path.with_suffix(".tmp")
        tmp.write_bytes(encode_checkpoint(state, dt))
        tmp.replace(path)
        logger.info(f"Checkpoint written at t={state.t:.6g} (step {state.step}): {path}")
        return path

    def load(self, path: str | Path, grid: ChannelGrid | None = None) -> tuple[SimState, float]:
        path = Path(path)
        if path.is_dir():
            path = self.latest(path)
        try:
            payload = path.read_bytes()
        except OSError as e:
            raise CheckpointError(f"Cannot read checkpoint {path}: {e}") from e
        state, dt = decode_checkpoint(payload)
        if grid is not None and state.grid != grid:
            raise CheckpointError(
                f"Checkpoint grid (kmax={state.grid.kmax}, n2={state.grid.n2}) does not match "
                f"the configured grid (kmax={grid.kmax}, n2={grid.n2})"
            )
        return state, dt

    def latest(self, directory: str | Path) -> Path:
        found = sorted(Path(directory).glob("step_*.ckpt"))
        if not found:
            raise CheckpointError(f"No checkpoints in {directory}")
        return found[-1]
