"""
Periodic-channel discretization T x (0, 1).

Fourier modes k = 0..kmax in x1 (period 2*pi), a uniform grid with both walls
in x2. Spectral data keep the Hermitian half-spectrum of real fields.
"""

from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy import fft

from ..exceptions import GridError, PreconditionError

X1_PERIOD = 2.0 * np.pi


@dataclass(frozen=True)
class ChannelGrid:
    kmax: int
    n1: int
    n2: int

    @property
    def dx1(self) -> float:
        return X1_PERIOD / self.n1

    @property
    def dx2(self) -> float:
        return 1.0 / (self.n2 - 1)

    @property
    def x1_period(self) -> float:
        return X1_PERIOD

    @property
    def dealias_cutoff(self) -> int:
        """Largest wavenumber kept by the 2/3 rule."""
        return self.n1 // 3

    @cached_property
    def x1(self) -> np.ndarray:
        x1 = np.arange(self.n1) * self.dx1
        x1.flags.writeable = False
        return x1

    @cached_property
    def x2(self) -> np.ndarray:
        # linspace pins both endpoints exactly
        x2 = np.linspace(0.0, 1.0, self.n2)
        x2.flags.writeable = False
        return x2

    @cached_property
    def wavenumbers(self) -> np.ndarray:
        k = np.arange(self.kmax + 1, dtype=float)
        k.flags.writeable = False
        return k

    @cached_property
    def trapezoid_weights(self) -> np.ndarray:
        w = np.full(self.n2, self.dx2)
        w[0] = w[-1] = 0.5 * self.dx2
        w.flags.writeable = False
        return w

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        """Physical coordinates as (n1, n2) arrays."""
        return np.meshgrid(self.x1, self.x2, indexing="ij")


def build_grid(kmax: int, n2: int) -> ChannelGrid:
    if kmax < 1:
        raise GridError(f"kmax must be >= 1, got {kmax}")
    if n2 < 9:
        raise GridError(f"n2 must be >= 9 for the wall-normal stencils, got {n2}")
    n1 = fft.next_fast_len(3 * kmax, real=True)
    return ChannelGrid(kmax=int(kmax), n1=int(n1), n2=int(n2))


@dataclass
class Field:
    grid: ChannelGrid
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        expected = (self.grid.n1, self.grid.n2)
        if self.values.shape != expected:
            raise PreconditionError(
                f"field shape {self.values.shape} does not match grid {expected}"
            )

    @classmethod
    def zeros(cls, grid: ChannelGrid) -> "Field":
        return cls(grid, np.zeros((grid.n1, grid.n2)))

    @classmethod
    def from_function(cls, grid: ChannelGrid, func) -> "Field":
        x1, x2 = grid.mesh()
        return cls(grid, np.broadcast_to(func(x1, x2), x1.shape).copy())

    @classmethod
    def from_profile(cls, grid: ChannelGrid, profile: np.ndarray) -> "Field":
        return cls(grid, np.tile(np.asarray(profile, dtype=float), (grid.n1, 1)))

    def zeros_like(self) -> "Field":
        return Field.zeros(self.grid)

    def is_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.values)))

    def __add__(self, other: "Field") -> "Field":
        return Field(self.grid, self.values + other.values)

    def __sub__(self, other: "Field") -> "Field":
        return Field(self.grid, self.values - other.values)

    def scaled(self, factor: float) -> "Field":
        return Field(self.grid, factor * self.values)


@dataclass
class SpectralField:
    """Coefficients indexed [k, j], k = 0..kmax."""

    grid: ChannelGrid
    coeffs: np.ndarray

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=complex)
        expected = (self.grid.kmax + 1, self.grid.n2)
        if self.coeffs.shape != expected:
            raise PreconditionError(
                f"spectral shape {self.coeffs.shape} does not match grid {expected}"
            )

    @classmethod
    def zeros(cls, grid: ChannelGrid) -> "SpectralField":
        return cls(grid, np.zeros((grid.kmax + 1, grid.n2), dtype=complex))

    @classmethod
    def from_profile(cls, grid: ChannelGrid, profile: np.ndarray) -> "SpectralField":
        """x1-independent data: only the k = 0 row is populated."""
        out = cls.zeros(grid)
        out.coeffs[0] = np.asarray(profile, dtype=float)
        return out

    def copy(self) -> "SpectralField":
        return SpectralField(self.grid, self.coeffs.copy())


def to_spectral(f: Field) -> SpectralField:
    if not f.is_finite():
        raise PreconditionError("to_spectral needs a finite field")
    grid = f.grid
    coeffs = fft.rfft(f.values, axis=0)[: grid.kmax + 1] / grid.n1
    coeffs[0] = coeffs[0].real
    return SpectralField(grid, coeffs)


def to_physical(f: SpectralField) -> Field:
    grid = f.grid
    padded = np.zeros((grid.n1 // 2 + 1, grid.n2), dtype=complex)
    padded[: grid.kmax + 1] = f.coeffs
    padded[0] = padded[0].real
    return Field(grid, fft.irfft(padded * grid.n1, n=grid.n1, axis=0))


def dealias(f: SpectralField) -> SpectralField:
    """Zero the modes above the 2/3 cutoff n1 // 3.

    On grids from build_grid n1 >= 3 kmax, so the cutoff is at least kmax and
    this is the identity: the x1 padding alone keeps product aliases out of
    the modes below kmax. Only hand-built grids with n1 < 3 kmax lose modes.
    """
    out = f.copy()
    out.coeffs[f.grid.dealias_cutoff + 1 :] = 0.0
    return out


def mode_weights(grid: ChannelGrid) -> np.ndarray:
    """Parseval multiplicity of each stored wavenumber (1 for k=0, else 2)."""
    weights = np.full(grid.kmax + 1, 2.0)
    weights[0] = 1.0
    return weights
