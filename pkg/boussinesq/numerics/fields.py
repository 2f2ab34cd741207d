"""
Differential operators, quadrature and discrete Sobolev norms on channel fields.

x1 derivatives are spectral; x2 derivatives are second-order finite
differences. Integrals use exact Fourier quadrature in x1 and the trapezoid
rule in x2.
"""

from dataclasses import dataclass
from typing import Literal

import numpy as np
from scipy import integrate as sp_integrate

from ..exceptions import PreconditionError
from .grid import ChannelGrid, Field, SpectralField, to_physical, to_spectral

Ddx2Scheme = Literal["one-sided-boundary", "interior-centered"]

MAX_SOBOLEV_ORDER = 4


@dataclass
class VelocityField:
    u1: Field
    u2: Field

    @property
    def grid(self) -> ChannelGrid:
        return self.u1.grid

    def __sub__(self, other: "VelocityField") -> "VelocityField":
        return VelocityField(self.u1 - other.u1, self.u2 - other.u2)

    @classmethod
    def zeros(cls, grid: ChannelGrid) -> "VelocityField":
        return cls(Field.zeros(grid), Field.zeros(grid))


def _check_order(k: int) -> int:
    if not 0 <= k <= MAX_SOBOLEV_ORDER:
        raise PreconditionError(f"Sobolev order must be in 0..{MAX_SOBOLEV_ORDER}, got {k}")
    return int(k)


# -- x2 stencils on raw arrays (last axis is x2) -----------------------------


def d1_array(values: np.ndarray, h: float, scheme: Ddx2Scheme = "one-sided-boundary") -> np.ndarray:
    if scheme == "one-sided-boundary":
        return np.gradient(values, h, axis=-1, edge_order=2)
    if scheme == "interior-centered":
        out = np.zeros_like(values)
        out[..., 1:-1] = (values[..., 2:] - values[..., :-2]) / (2.0 * h)
        return out
    raise PreconditionError(f"unknown ddx2 scheme {scheme!r}")


def d2_array(values: np.ndarray, h: float) -> np.ndarray:
    out = np.empty_like(values)
    out[..., 1:-1] = (values[..., 2:] - 2.0 * values[..., 1:-1] + values[..., :-2]) / h**2
    out[..., 0] = (
        2.0 * values[..., 0] - 5.0 * values[..., 1] + 4.0 * values[..., 2] - values[..., 3]
    ) / h**2
    out[..., -1] = (
        2.0 * values[..., -1] - 5.0 * values[..., -2] + 4.0 * values[..., -3] - values[..., -4]
    ) / h**2
    return out


def d2_power_array(values: np.ndarray, h: float, order: int) -> np.ndarray:
    """Repeated x2 derivative; even orders are built from the second-derivative stencil."""
    out = values
    for _ in range(order // 2):
        out = d2_array(out, h)
    if order % 2:
        out = d1_array(out, h)
    return out


# -- operators ---------------------------------------------------------------


def ddx1(f: SpectralField) -> SpectralField:
    k = f.grid.wavenumbers[:, None]
    return SpectralField(f.grid, 1j * k * f.coeffs)


def ddx1_physical(f: Field, order: int = 1) -> Field:
    if order == 0:
        return f
    hat = to_spectral(f)
    k = f.grid.wavenumbers[:, None]
    return to_physical(SpectralField(f.grid, (1j * k) ** order * hat.coeffs))


def ddx2(f: Field, scheme: Ddx2Scheme = "one-sided-boundary") -> Field:
    return Field(f.grid, d1_array(f.values, f.grid.dx2, scheme))


def d2dx2(f: Field) -> Field:
    return Field(f.grid, d2_array(f.values, f.grid.dx2))


def laplacian(f: SpectralField) -> SpectralField:
    k2 = f.grid.wavenumbers[:, None] ** 2
    return SpectralField(f.grid, d2_array(f.coeffs, f.grid.dx2) - k2 * f.coeffs)


def integrate(f: Field) -> float:
    grid = f.grid
    columns = sp_integrate.trapezoid(f.values, dx=grid.dx2, axis=1)
    return float(grid.dx1 * np.sum(columns))


def l2_norm(f: Field) -> float:
    return float(np.sqrt(integrate(Field(f.grid, f.values**2))))


def _mixed_derivatives(f: Field, k: int):
    """Yield every d1^a d2^b f with a + b <= k."""
    for a in range(k + 1):
        g = ddx1_physical(f, a)
        for b in range(k - a + 1):
            if b == 0:
                yield g.values
            else:
                yield d2_power_array(g.values, f.grid.dx2, b)


def h_k_norm(f: Field, k: int) -> float:
    k = _check_order(k)
    total = 0.0
    for values in _mixed_derivatives(f, k):
        total += integrate(Field(f.grid, values**2))
    return float(np.sqrt(total))


def w_k_inf_grid_max(f: Field, k: int) -> float:
    """Grid maximum over all derivatives of order <= k. Diagnostic only."""
    k = _check_order(k)
    return float(max(np.max(np.abs(values)) for values in _mixed_derivatives(f, k)))


def velocity_l2(u: VelocityField) -> float:
    return float(np.sqrt(l2_norm(u.u1) ** 2 + l2_norm(u.u2) ** 2))


def grad_sq(u: VelocityField) -> float:
    """||grad u||^2 summed over both components."""
    total = 0.0
    for comp in (u.u1, u.u2):
        total += l2_norm(ddx1_physical(comp)) ** 2
        total += l2_norm(ddx2(comp)) ** 2
    return float(total)


def divergence(u: VelocityField) -> Field:
    """d1 u1 + d2 u2 on interior nodes; wall rows are zero."""
    div = ddx1_physical(u.u1).values + d1_array(u.u2.values, u.grid.dx2, "interior-centered")
    div[:, 0] = 0.0
    div[:, -1] = 0.0
    return Field(u.grid, div)


def stratification_surrogate(rho: Field) -> float:
    """||grad v|| for the steady Stokes velocity driven by rho."""
    from .elliptic import solve_stokes_buoyancy

    stokes = solve_stokes_buoyancy(rho)
    return float(np.sqrt(grad_sq(stokes.v)))
