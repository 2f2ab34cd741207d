"""
Time integration of the perturbation Boussinesq system with no-slip walls.

State is kept per Fourier mode as the density perturbation theta and the
velocity stream function phi (u = (-d2 phi, d1 phi)), plus the x1-mean
horizontal velocity which the stream function cannot carry. Advection and
buoyancy are explicit (AB2, Euler on the first step); viscosity is
Crank-Nicolson through the clamped biharmonic operator. theta is pure
transport, stabilized only by the 2/3 rule.
"""

import logging
import struct
import zlib
from dataclasses import dataclass, field, replace
from typing import Literal

import numpy as np
from scipy import ndimage
from scipy.interpolate import CubicSpline

from ..exceptions import (
    CFLViolationError,
    CheckpointError,
    NumericalDivergenceError,
    PreconditionError,
)
from .elliptic import implicit_vorticity_operator, mode_laplacian, clamped_bilaplacian, solve_helmholtz
from .fields import VelocityField, d1_array, d2_array
from .grid import ChannelGrid, Field, SpectralField, dealias, mode_weights, to_physical, to_spectral

logger = logging.getLogger(__name__)

InitialKind = Literal["stable", "bubble", "custom"]

MAX_CFL_TARGET = 0.9
VELOCITY_FLOOR = 1e-12


@dataclass(frozen=True)
class HydrostaticProfile:
    rho_s: np.ndarray
    drho_s: np.ndarray

    @property
    def gamma(self) -> float:
        """Stability margin min(-d2 rho_s)."""
        return float(np.min(-self.drho_s))

    @property
    def is_stable(self) -> bool:
        return self.gamma > 0.0

    @classmethod
    def linear(cls, grid: ChannelGrid, alpha: float) -> "HydrostaticProfile":
        x2 = np.asarray(grid.x2)
        return cls(rho_s=1.0 - alpha * x2, drho_s=np.full(grid.n2, -float(alpha)))

    @classmethod
    def tabulated(cls, grid: ChannelGrid, x2_table, rho_table) -> "HydrostaticProfile":
        x2_table = np.asarray(x2_table, dtype=float)
        rho_table = np.asarray(rho_table, dtype=float)
        if x2_table.ndim != 1 or x2_table.shape != rho_table.shape or x2_table.size < 4:
            raise PreconditionError("tabulated profile needs two matching columns of >= 4 rows")
        if x2_table[0] > 0.0 or x2_table[-1] < 1.0:
            raise PreconditionError("tabulated profile must cover [0, 1]")
        spline = CubicSpline(x2_table, rho_table)
        x2 = np.asarray(grid.x2)
        return cls(rho_s=spline(x2), drho_s=spline.derivative()(x2))


@dataclass(frozen=True)
class StepHistory:
    """Explicit right-hand sides from the previous step."""

    theta_rhs: np.ndarray
    vorticity_rhs: np.ndarray
    mean_rhs: np.ndarray


@dataclass
class SimState:
    t: float
    theta: SpectralField
    phi: SpectralField
    mean_u1: np.ndarray
    history: StepHistory | None = None
    step: int = 0

    @property
    def grid(self) -> ChannelGrid:
        return self.theta.grid

    def snapshot(self) -> "SimState":
        return SimState(
            t=self.t,
            theta=self.theta.copy(),
            phi=self.phi.copy(),
            mean_u1=self.mean_u1.copy(),
            history=self.history,
            step=self.step,
        )


@dataclass(frozen=True)
class StepParams:
    dt: float
    t_final: float
    cfl_target: float = 0.5
    output_every: int = 10
    dt_max: float = 1e-2

    def __post_init__(self):
        if not self.dt > 0:
            raise PreconditionError(f"dt must be positive, got {self.dt}")
        if not 0 < self.cfl_target <= MAX_CFL_TARGET:
            raise PreconditionError(
                f"cfl_target must be in (0, {MAX_CFL_TARGET}], got {self.cfl_target}"
            )
        if self.output_every < 1:
            raise PreconditionError("output_every must be >= 1")


@dataclass
class InitialData:
    state: SimState
    profile: HydrostaticProfile
    metadata: dict = field(default_factory=dict)


# -- initial data ------------------------------------------------------------


def wall_taper(x2: np.ndarray) -> np.ndarray:
    """sin^4(pi x2): vanishes at the walls with its first three derivatives."""
    return np.sin(np.pi * x2) ** 4


def stable_perturbation(grid: ChannelGrid, eps: float) -> Field:
    return Field.from_function(grid, lambda x1, x2: eps * np.cos(x1) * wall_taper(x2))


def bubble_perturbation(grid: ChannelGrid, eps: float, sigma: float, lam: float) -> Field:
    return Field.from_function(
        grid,
        lambda x1, x2: eps
        * np.exp(-((x1 - np.pi) ** 2 + lam * (x2 - 0.5) ** 2) / sigma**2)
        * wall_taper(x2),
    )


def is_monotone_in_x2(rho: Field) -> bool:
    return bool(np.all(np.diff(rho.values, axis=1) < 0.0))


def is_bubble_type(rho: Field, levels: int = 16) -> bool:
    """Look for a closed level curve around an interior local maximum.

    For each interior local maximum, superlevel sets just below the peak are
    labelled; a component that reaches neither wall, does not wrap around
    the period and has no holes is bounded by a closed curve enclosing a
    simply connected set.
    """
    values = rho.values
    n1, n2 = values.shape
    peak_filter = ndimage.maximum_filter(values, size=3, mode=("wrap", "nearest"))
    candidates = np.argwhere(values == peak_filter)
    candidates = candidates[(candidates[:, 1] > 0) & (candidates[:, 1] < n2 - 1)]
    spread = float(np.max(values) - np.min(values))
    if spread == 0.0 or candidates.size == 0:
        return False
    for i, j in candidates:
        peak = values[i, j]
        # roll the peak to the middle column so a component cannot straddle the seam
        shifted = np.roll(values, n1 // 2 - i, axis=0)
        ic = n1 // 2
        for frac in np.geomspace(1e-6, 0.5, levels):
            level = peak - frac * spread
            labels, _ = ndimage.label(shifted > level)
            component = labels == labels[ic, j]
            if component[:, 0].any() or component[:, -1].any():
                break
            if component[0, :].any() or component[-1, :].any():
                break
            filled = ndimage.binary_fill_holes(component)
            if np.array_equal(filled, component):
                return True
    return False


def initial_data(
    kind: InitialKind,
    eps: float,
    profile: HydrostaticProfile,
    grid: ChannelGrid,
    *,
    sigma: float = 0.15,
    lam: float = 4.0,
    density: np.ndarray | None = None,
) -> InitialData:
    if eps < 0:
        raise PreconditionError(f"eps must be >= 0, got {eps}")
    if kind == "stable":
        theta = stable_perturbation(grid, eps)
    elif kind == "bubble":
        if eps == 0:
            raise PreconditionError("bubble initial data needs eps > 0")
        theta = bubble_perturbation(grid, eps, sigma, lam)
    elif kind == "custom":
        if density is None:
            raise PreconditionError("custom initial data needs a density array")
        rho0 = Field(grid, density)
        theta = Field(grid, rho0.values - profile.rho_s[None, :])
    else:
        raise PreconditionError(f"unknown initial data kind {kind!r}")

    rho0 = Field(grid, theta.values + profile.rho_s[None, :])
    monotone = is_monotone_in_x2(rho0)
    metadata = {
        "kind": kind,
        "eps": eps,
        "monotone": monotone,
        "bubble_type": is_bubble_type(rho0) if kind != "stable" else False,
        "gamma": profile.gamma,
        "wall_theta_max": float(
            max(np.max(np.abs(theta.values[:, 0])), np.max(np.abs(theta.values[:, -1])))
        ),
    }
    if kind == "bubble" and not monotone:
        logger.warning(f"bubble initial density is not monotone in x2 (eps={eps})")

    state = SimState(
        t=0.0,
        theta=to_spectral(theta),
        phi=SpectralField.zeros(grid),
        mean_u1=np.zeros(grid.n2),
    )
    return InitialData(state=state, profile=profile, metadata=metadata)


def density(state: SimState, profile: HydrostaticProfile) -> Field:
    return Field(state.grid, to_physical(state.theta).values + profile.rho_s[None, :])


# -- right-hand sides ----------------------------------------------------------


def _velocity_coeffs(state: SimState) -> tuple[np.ndarray, np.ndarray]:
    grid = state.grid
    k = grid.wavenumbers[:, None]
    u1 = -d1_array(state.phi.coeffs, grid.dx2, "interior-centered")
    u1[0] += state.mean_u1
    u2 = 1j * k * state.phi.coeffs
    return u1, u2


def velocity_from_state(state: SimState) -> VelocityField:
    grid = state.grid
    u1, u2 = _velocity_coeffs(state)
    return VelocityField(
        to_physical(SpectralField(grid, u1)),
        to_physical(SpectralField(grid, u2)),
    )


def vorticity_coeffs(state: SimState) -> np.ndarray:
    """omega = lap phi for k >= 1 (Jensen closure on the walls), -d2 mean_u1 for k = 0."""
    grid = state.grid
    h = grid.dx2
    phi = state.phi.coeffs
    k2 = (grid.wavenumbers**2)[:, None]
    omega = np.zeros_like(phi)
    omega[:, 1:-1] = (phi[:, 2:] - 2.0 * phi[:, 1:-1] + phi[:, :-2]) / h**2 - k2 * phi[:, 1:-1]
    omega[:, 0] = (8.0 * phi[:, 1] - phi[:, 2]) / (2.0 * h**2)
    omega[:, -1] = (8.0 * phi[:, -2] - phi[:, -3]) / (2.0 * h**2)
    omega[0] = -d1_array(state.mean_u1, h)
    return omega


def _advect(u1: Field, u2: Field, scalar_hat: np.ndarray, grid: ChannelGrid) -> Field:
    """u . grad s in physical space."""
    k = grid.wavenumbers[:, None]
    d1s = to_physical(SpectralField(grid, 1j * k * scalar_hat))
    s = to_physical(SpectralField(grid, scalar_hat))
    d2s = d1_array(s.values, grid.dx2)
    return Field(grid, u1.values * d1s.values + u2.values * d2s)


def rhs_theta(state: SimState, profile: HydrostaticProfile) -> SpectralField:
    """-u . grad theta - d2 rho_s u2, dealiased."""
    grid = state.grid
    u = velocity_from_state(state)
    advection = _advect(u.u1, u.u2, state.theta.coeffs, grid)
    rhs = Field(grid, -advection.values - profile.drho_s[None, :] * u.u2.values)
    return dealias(to_spectral(rhs))


def rhs_vorticity(state: SimState) -> SpectralField:
    """-u . grad omega - d1 theta, dealiased. Viscosity is handled implicitly."""
    grid = state.grid
    u = velocity_from_state(state)
    advection = to_spectral(_advect(u.u1, u.u2, vorticity_coeffs(state), grid))
    k = grid.wavenumbers[:, None]
    return dealias(SpectralField(grid, -advection.coeffs - 1j * k * state.theta.coeffs))


def rhs_mean_flow(state: SimState) -> np.ndarray:
    """Explicit part of the x1-mean momentum equation: -(u . grad u1)_0."""
    grid = state.grid
    u = velocity_from_state(state)
    u1_hat, _ = _velocity_coeffs(state)
    advection = to_spectral(_advect(u.u1, u.u2, u1_hat, grid))
    return -advection.coeffs[0].real


# -- stepping -------------------------------------------------------------------


def max_speed(state: SimState) -> float:
    u = velocity_from_state(state)
    return float(np.max(np.hypot(u.u1.values, u.u2.values)))


def cfl_dt(state: SimState, cfl_target: float, dt_max: float = 1e-2) -> float:
    grid = state.grid
    speed = max(max_speed(state), VELOCITY_FLOOR)
    return float(min(cfl_target * min(grid.dx1, grid.dx2) / speed, dt_max))


def resolution_tail(theta: SpectralField) -> float:
    """Share of the theta spectrum above 2/3 of kmax."""
    grid = theta.grid
    energy = mode_weights(grid) * np.sum(grid.trapezoid_weights * np.abs(theta.coeffs) ** 2, axis=1)
    total = float(np.sum(energy))
    if total == 0.0:
        return 0.0
    return float(np.sum(energy[(2 * grid.kmax) // 3 + 1 :]) / total)


def _ab2(current: np.ndarray, previous: np.ndarray | None) -> np.ndarray:
    if previous is None:
        return current
    return 1.5 * current - 0.5 * previous


def _check_finite(state: SimState) -> None:
    for name, values in (
        ("theta", state.theta.coeffs),
        ("phi", state.phi.coeffs),
        ("mean_u1", state.mean_u1),
    ):
        if not np.all(np.isfinite(values)):
            raise NumericalDivergenceError(
                f"non-finite values in {name} at t={state.t:.6g}", field=name, t=state.t
            )


def step(state: SimState, params: StepParams, profile: HydrostaticProfile) -> SimState:
    grid = state.grid
    dt = params.dt
    h = grid.dx2

    speed = max_speed(state)
    courant = dt * speed / min(grid.dx1, grid.dx2)
    if courant > params.cfl_target:
        suggested = cfl_dt(state, params.cfl_target, params.dt_max)
        raise CFLViolationError(
            f"CFL number {courant:.3f} exceeds {params.cfl_target} at t={state.t:.6g}; "
            f"try dt <= {suggested:.3e}",
            suggested_dt=suggested,
            t=state.t,
        )

    theta_rhs = rhs_theta(state, profile).coeffs
    vort_rhs = rhs_vorticity(state).coeffs
    mean_rhs = rhs_mean_flow(state)
    previous = state.history

    theta = state.theta.coeffs + dt * _ab2(theta_rhs, previous.theta_rhs if previous else None)
    theta[0] = theta[0].real

    explicit_vort = _ab2(vort_rhs, previous.vorticity_rhs if previous else None)
    phi = np.zeros_like(state.phi.coeffs)
    for k in range(1, grid.kmax + 1):
        old = state.phi.coeffs[k, 1:-1]
        lap = mode_laplacian(grid.n2, k)
        bilap = clamped_bilaplacian(grid.n2, k)
        rhs = lap @ old + 0.5 * dt * (bilap @ old) + dt * explicit_vort[k, 1:-1]
        phi[k, 1:-1] = implicit_vorticity_operator(grid.n2, k, dt).solve(rhs)

    mean = state.mean_u1
    explicit_mean = _ab2(mean_rhs, previous.mean_rhs if previous else None)
    mean_rhs_full = mean + 0.5 * dt * d2_array(mean, h) + dt * explicit_mean
    mean_new = solve_helmholtz(0, 0.5 * dt, mean_rhs_full)

    new_state = SimState(
        t=state.t + dt,
        theta=SpectralField(grid, theta),
        phi=SpectralField(grid, phi),
        mean_u1=np.asarray(mean_new, dtype=float),
        history=StepHistory(theta_rhs=theta_rhs, vorticity_rhs=vort_rhs, mean_rhs=mean_rhs),
        step=state.step + 1,
    )
    _check_finite(new_state)
    return new_state


def with_dt_history_reset(state: SimState) -> SimState:
    """Drop the multistep history, e.g. after a step-size change."""
    return replace(state, history=None)


# -- checkpoints ------------------------------------------------------------------

CHECKPOINT_MAGIC = b"BQCK"
CHECKPOINT_VERSION = 1
_HEADER = struct.Struct("<4sIIIIdqdI")


def encode_checkpoint(state: SimState, dt: float) -> bytes:
    """Little-endian header (magic, version, kmax, n1, n2, t, step, dt, has_history),
    float64/complex128 payload, then the CRC32 of everything before it."""
    grid = state.grid
    has_history = state.history is not None
    header = _HEADER.pack(
        CHECKPOINT_MAGIC,
        CHECKPOINT_VERSION,
        grid.kmax,
        grid.n1,
        grid.n2,
        float(state.t),
        int(state.step),
        float(dt),
        int(has_history),
    )
    parts = [
        header,
        state.theta.coeffs.astype("<c16").tobytes(),
        state.phi.coeffs.astype("<c16").tobytes(),
        np.asarray(state.mean_u1).astype("<f8").tobytes(),
    ]
    if has_history:
        parts += [
            state.history.theta_rhs.astype("<c16").tobytes(),
            state.history.vorticity_rhs.astype("<c16").tobytes(),
            np.asarray(state.history.mean_rhs).astype("<f8").tobytes(),
        ]
    body = b"".join(parts)
    return body + struct.pack("<I", zlib.crc32(body))


def decode_checkpoint(payload: bytes) -> tuple[SimState, float]:
    if len(payload) < _HEADER.size + 4:
        raise CheckpointError("checkpoint is truncated")
    body, (crc,) = payload[:-4], struct.unpack("<I", payload[-4:])
    if zlib.crc32(body) != crc:
        raise CheckpointError("checkpoint CRC mismatch")
    magic, version, kmax, n1, n2, t, step_count, dt, has_history = _HEADER.unpack_from(body)
    if magic != CHECKPOINT_MAGIC:
        raise CheckpointError(f"bad checkpoint magic {magic!r}")
    if version != CHECKPOINT_VERSION:
        raise CheckpointError(f"unsupported checkpoint version {version}")
    grid = ChannelGrid(kmax=kmax, n1=n1, n2=n2)

    spectral_size = (kmax + 1) * n2
    offset = _HEADER.size

    def take(dtype: str, count: int) -> np.ndarray:
        nonlocal offset
        width = np.dtype(dtype).itemsize * count
        if offset + width > len(body):
            raise CheckpointError("checkpoint payload is shorter than its header says")
        chunk = np.frombuffer(body, dtype=dtype, count=count, offset=offset).copy()
        offset += width
        return chunk

    theta = take("<c16", spectral_size).reshape(kmax + 1, n2)
    phi = take("<c16", spectral_size).reshape(kmax + 1, n2)
    mean_u1 = take("<f8", n2)
    history = None
    if has_history:
        history = StepHistory(
            theta_rhs=take("<c16", spectral_size).reshape(kmax + 1, n2),
            vorticity_rhs=take("<c16", spectral_size).reshape(kmax + 1, n2),
            mean_rhs=take("<f8", n2),
        )
    if offset != len(body):
        raise CheckpointError("checkpoint has trailing bytes")
    state = SimState(
        t=t,
        theta=SpectralField(grid, theta),
        phi=SpectralField(grid, phi),
        mean_u1=mean_u1,
        history=history,
        step=step_count,
    )
    return state, dt
