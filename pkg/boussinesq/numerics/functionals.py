"""
Energy functionals, the velocity defect, the Lyapunov combination, vertical
rearrangement and the time-series diagnostics built on them.

A diagnostics series is a mapping from column name to a 1D array sampled at
the times in the "t" column.
"""

from collections.abc import Mapping, Sequence
from dataclasses import astuple, dataclass, fields
from typing import Literal

import numpy as np
from scipy import integrate as sp_integrate

from ..exceptions import CoverageError, PreconditionError
from .dynamics import HydrostaticProfile, SimState, density, velocity_from_state
from .elliptic import solve_stokes_buoyancy
from .fields import (
    VelocityField,
    ddx1_physical,
    grad_sq,
    h_k_norm,
    integrate,
    l2_norm,
    velocity_l2,
)
from .grid import Field

RearrangementMethod = Literal["cells", "interpolated"]
Series = Mapping[str, np.ndarray]

LYAPUNOV_C1_MAX = 1e6
LYAPUNOV_SLACK = 1e-10


@dataclass(frozen=True)
class DiagnosticsRecord:
    t: float
    E_P: float
    E_K: float
    E_T: float
    S: float
    grad_u_sq: float
    grad_v_sq: float
    grad_w_sq: float
    d1rho_l2: float
    d1rho_h1: float
    strat_surrogate: float
    dist_rearr: float
    u_l2: float

    @classmethod
    def columns(cls) -> list[str]:
        return [f.name for f in fields(cls)]

    def as_row(self) -> tuple[float, ...]:
        return astuple(self)


COLUMNS = DiagnosticsRecord.columns()


@dataclass(frozen=True)
class DefectFields:
    v: VelocityField
    w: VelocityField
    S: float
    grad_u_sq: float
    grad_v_sq: float
    grad_w_sq: float


@dataclass(frozen=True)
class RearrangementResult:
    rho_star: np.ndarray
    layer_measures: np.ndarray
    method: str


@dataclass(frozen=True)
class SandwichRatios:
    lower_ratio: float
    upper_ratio: float
    gradient_ratio: float
    degenerate: bool
    large_perturbation: bool


@dataclass(frozen=True)
class SlopeFit:
    slope: float
    intercept: float
    residual: float
    window: tuple[float, float]
    samples: int
    spans_decade: bool


@dataclass(frozen=True)
class InstabilityProxies:
    min_d1rho: float
    cumulative_gradv: np.ndarray
    decade_increments: list[float]
    saturating: bool
    lowerbound_growth_k1: float


# -- energies and the defect --------------------------------------------------


def energies(rho: Field, u: VelocityField, rho0_star: np.ndarray) -> tuple[float, float, float]:
    x2 = np.asarray(rho.grid.x2)[None, :]
    e_p = integrate(Field(rho.grid, (rho.values - np.asarray(rho0_star)[None, :]) * x2))
    e_k = 0.5 * velocity_l2(u) ** 2
    return e_p, e_k, e_p + e_k


def defect_fields(rho: Field, u: VelocityField) -> DefectFields:
    v = solve_stokes_buoyancy(rho).v
    w = u - v
    return DefectFields(
        v=v,
        w=w,
        S=0.5 * velocity_l2(w) ** 2,
        grad_u_sq=grad_sq(u),
        grad_v_sq=grad_sq(v),
        grad_w_sq=grad_sq(w),
    )


def compute_record(
    state: SimState, profile: HydrostaticProfile, rho0_star: np.ndarray
) -> DiagnosticsRecord:
    rho = density(state, profile)
    u = velocity_from_state(state)
    e_p, e_k, e_t = energies(rho, u, rho0_star)
    defect = defect_fields(rho, u)
    d1rho = ddx1_physical(rho)
    return DiagnosticsRecord(
        t=float(state.t),
        E_P=e_p,
        E_K=e_k,
        E_T=e_t,
        S=defect.S,
        grad_u_sq=defect.grad_u_sq,
        grad_v_sq=defect.grad_v_sq,
        grad_w_sq=defect.grad_w_sq,
        d1rho_l2=l2_norm(d1rho),
        d1rho_h1=h_k_norm(d1rho, 1),
        strat_surrogate=float(np.sqrt(defect.grad_v_sq)),
        dist_rearr=l2_norm(Field(rho.grid, rho.values - np.asarray(rho0_star)[None, :])),
        u_l2=velocity_l2(u),
    )


# -- Lyapunov functional ------------------------------------------------------


def lyapunov_value(rec: DiagnosticsRecord, C1: float) -> float:
    if not C1 > 0:
        raise PreconditionError(f"C1 must be positive, got {C1}")
    return C1 * rec.E_T + rec.S


def lyapunov_series(series: Series, C1: float) -> np.ndarray:
    return C1 * np.asarray(series["E_T"]) + np.asarray(series["S"])


def lyapunov_nonincreasing(series: Series, C1: float) -> bool:
    """Whether C1 E_T + S never rises between samples by more than the slack.

    The slack is relative to C1 |E_T(0)| + |S(0)|.
    """
    e_t, s = np.asarray(series["E_T"]), np.asarray(series["S"])
    slack = LYAPUNOV_SLACK * (C1 * abs(e_t[0]) + abs(s[0]))
    return bool(np.all(np.diff(C1 * e_t + s) <= slack))


def minimal_lyapunov_C1(series: Series | Sequence[DiagnosticsRecord]) -> float:
    """Smallest C1 >= 0 making C1 E_T + S non-increasing on the samples.

    Each step gives a linear constraint on C1: a lower bound where E_T falls, an
    upper bound where it rises. The result is the lower end of their
    intersection, or +inf when it is empty or starts above LYAPUNOV_C1_MAX.
    """
    cols = as_series(series)
    t = cols["t"]
    if t.size < 3:
        raise PreconditionError("need at least three samples")
    if np.any(np.diff(t) <= 0):
        raise PreconditionError("sample times must be strictly increasing")
    e_t, s = cols["E_T"], cols["S"]

    # C1 dE + dS <= eps (C1 |E0| + |S0|), with half the slack kept as margin.
    eps = 0.5 * LYAPUNOV_SLACK
    a = np.diff(e_t) - eps * abs(e_t[0])
    b = eps * abs(s[0]) - np.diff(s)
    if np.any((a == 0) & (b < 0)):
        return float("inf")
    falling, rising = a < 0, a > 0
    lo = max(0.0, float(np.max(b[falling] / a[falling], initial=0.0)))
    hi = float(np.min(b[rising] / a[rising], initial=np.inf))
    if lo > hi or lo > LYAPUNOV_C1_MAX:
        return float("inf")
    return lo


# -- vertical rearrangement ------------------------------------------------------


def _layer_units(n2: int) -> np.ndarray:
    """Trapezoid weights in units of dx2/2: walls 1, interior 2."""
    units = np.full(n2, 2, dtype=np.int64)
    units[0] = units[-1] = 1
    return units


def _rearrange_cells(rho: Field) -> RearrangementResult:
    grid = rho.grid
    n1, n2 = grid.n1, grid.n2
    values = rho.values.ravel()
    units_row = _layer_units(n2)
    cell_units = np.tile(units_row, n1)
    i1, i2 = np.meshgrid(np.arange(n1), np.arange(n2), indexing="ij")
    # descending value, then x2, then x1
    order = np.lexsort((i1.ravel(), i2.ravel(), -values))
    sorted_values = values[order]
    sorted_units = cell_units[order]
    cell_end = np.cumsum(sorted_units)
    cell_start = cell_end - sorted_units
    weighted = np.concatenate([[0.0], np.cumsum(sorted_values * sorted_units)])

    layer_units = n1 * units_row
    layer_end = np.cumsum(layer_units)
    layer_start = layer_end - layer_units

    def cumulative(position: np.ndarray) -> np.ndarray:
        idx = np.searchsorted(cell_end, position, side="left")
        idx = np.minimum(idx, sorted_values.size - 1)
        return weighted[idx] + (position - cell_start[idx]) * sorted_values[idx]

    rho_star = (cumulative(layer_end) - cumulative(layer_start)) / layer_units
    first = np.searchsorted(cell_end, layer_start, side="right")
    last = np.searchsorted(cell_end, layer_end, side="left")
    for j in range(n2):
        lo, hi = sorted_values[last[j]], sorted_values[first[j]]
        if lo == hi:
            rho_star[j] = hi
    return RearrangementResult(
        rho_star=rho_star,
        layer_measures=layer_units * grid.dx1 * 0.5 * grid.dx2,
        method="cells",
    )


def _rearrange_interpolated(rho: Field) -> RearrangementResult:
    """Exact rearrangement of the column-wise piecewise-linear interpolant."""
    grid = rho.grid
    h = grid.dx2
    seg_weight = grid.dx1 * h
    a = rho.values[:, :-1].ravel()
    b = rho.values[:, 1:].ravel()
    lo = np.minimum(a, b)
    hi = np.maximum(a, b)
    sloped = hi > lo
    rate = seg_weight / (hi[sloped] - lo[sloped])

    # measure of {rho > s} drops linearly across each sloped segment's range
    # and jumps at flat segments
    breakpoints = np.unique(np.concatenate([lo, hi]))
    slope_change = np.zeros(breakpoints.size)
    np.add.at(slope_change, np.searchsorted(breakpoints, lo[sloped]), -rate)
    np.add.at(slope_change, np.searchsorted(breakpoints, hi[sloped]), rate)
    jumps = np.zeros(breakpoints.size)
    np.add.at(jumps, np.searchsorted(breakpoints, lo[~sloped]), seg_weight)
    slopes = np.cumsum(slope_change)[:-1]
    drop = -slopes * np.diff(breakpoints)

    total = grid.x1_period
    # measure just above each breakpoint, and just below it (before flat jumps)
    above = total - np.concatenate([[0.0], np.cumsum(drop)]) - np.cumsum(jumps)
    below = above + jumps
    heights = np.empty(2 * breakpoints.size)
    levels = np.empty(2 * breakpoints.size)
    heights[0::2] = below / total
    heights[1::2] = above / total
    levels[0::2] = breakpoints
    levels[1::2] = breakpoints
    # np.interp needs ascending abscissae; roundoff can break monotonicity
    heights = np.maximum.accumulate(np.clip(heights[::-1], 0.0, 1.0))
    x2 = np.asarray(grid.x2)
    rho_star = np.minimum.accumulate(np.interp(x2, heights, levels[::-1]))
    return RearrangementResult(
        rho_star=rho_star,
        layer_measures=np.full(grid.n2 - 1, grid.x1_period * h),
        method="interpolated",
    )


def vertical_rearrangement(rho: Field, method: RearrangementMethod = "cells") -> RearrangementResult:
    if method == "cells":
        return _rearrange_cells(rho)
    if method == "interpolated":
        return _rearrange_interpolated(rho)
    raise PreconditionError(f"unknown rearrangement method {method!r}")


# -- sandwich ratios ---------------------------------------------------------------


def propoos_sandwich(
    f: Field,
    profile: HydrostaticProfile,
    method: RearrangementMethod = "interpolated",
    smallness: float = 1.0,
) -> SandwichRatios:
    """Empirical ratios of the potential-energy sandwich and the d1 lower bound.

    lower = int (f - f*) x2 / ||f - f*||^2, upper = its reciprocal,
    gradient = ||d1 f|| / ||f - f*||.
    """
    f_star = vertical_rearrangement(f, method).rho_star
    diff = Field(f.grid, f.values - f_star[None, :])
    dist_sq = l2_norm(diff) ** 2
    x2 = np.asarray(f.grid.x2)[None, :]
    potential = integrate(Field(f.grid, diff.values * x2))
    perturbation = Field(f.grid, f.values - profile.rho_s[None, :])
    large = h_k_norm(perturbation, 3) > smallness * max(profile.gamma, 0.0)
    scale = max(l2_norm(f) ** 2, 1.0)
    if dist_sq <= 1e-28 * scale or potential <= 0.0:
        nan = float("nan")
        return SandwichRatios(nan, nan, nan, degenerate=True, large_perturbation=large)
    return SandwichRatios(
        lower_ratio=potential / dist_sq,
        upper_ratio=dist_sq / potential,
        gradient_ratio=l2_norm(ddx1_physical(f)) / np.sqrt(dist_sq),
        degenerate=False,
        large_perturbation=large,
    )


# -- time series -------------------------------------------------------------------


def as_series(data: Series | Sequence[DiagnosticsRecord]) -> dict[str, np.ndarray]:
    if isinstance(data, Mapping):
        return {name: np.asarray(values, dtype=float) for name, values in data.items()}
    records = list(data)
    return {
        name: np.array([getattr(rec, name) for rec in records], dtype=float) for name in COLUMNS
    }


def quantity(series: Series, name: str) -> np.ndarray:
    """A column, or one of the composites 'dissipation' and 'distance'."""
    if name == "dissipation":
        return np.asarray(series["grad_u_sq"]) + np.asarray(series["grad_v_sq"]) + np.asarray(series["grad_w_sq"])
    if name == "distance":
        return np.asarray(series["dist_rearr"]) + np.asarray(series["u_l2"])
    if name not in series:
        raise PreconditionError(f"unknown series quantity {name!r}")
    return np.asarray(series[name], dtype=float)


def window_averages(times: np.ndarray, values: np.ndarray, ends) -> np.ndarray:
    """(2/t) int_{t/2}^{t} of the piecewise-linear interpolant, for every t in ends."""
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    ends = np.atleast_1d(np.asarray(ends, dtype=float))
    if np.any(ends <= 0):
        raise PreconditionError("window ends must be positive")
    if times.size < 2:
        raise CoverageError("need at least two samples for a window average")
    rel = 1e-9 * np.maximum(np.abs(ends), 1.0)
    uncovered = (0.5 * ends < times[0] - rel) | (ends > times[-1] + rel)
    if np.any(uncovered):
        bad = float(ends[uncovered][0])
        raise CoverageError(
            f"samples cover [{times[0]:.6g}, {times[-1]:.6g}], "
            f"window needs [{0.5 * bad:.6g}, {bad:.6g}]"
        )
    cumulative = sp_integrate.cumulative_trapezoid(values, times, initial=0.0)

    def integral_to(s: np.ndarray) -> np.ndarray:
        s = np.clip(s, times[0], times[-1])
        idx = np.clip(np.searchsorted(times, s, side="right") - 1, 0, times.size - 2)
        at_s = np.interp(s, times, values)
        return cumulative[idx] + 0.5 * (s - times[idx]) * (values[idx] + at_s)

    return 2.0 / ends * (integral_to(ends) - integral_to(0.5 * ends))


def window_average(series: Series, name: str, t: float) -> float:
    """(2/t) times the time integral over [t/2, t]."""
    return float(window_averages(series["t"], quantity(series, name), [t])[0])


def decay_slope(series: Series, name: str, t_window: tuple[float, float]) -> SlopeFit:
    """Least-squares slope of log(quantity) against log(t) inside the window."""
    start, end = t_window
    times = np.asarray(series["t"], dtype=float)
    y = quantity(series, name)
    mask = (times >= start) & (times <= end) & (times > 0)
    if mask.sum() < 2:
        raise CoverageError(f"fewer than two samples in window [{start}, {end}]")
    if np.any(y[mask] <= 0):
        raise PreconditionError(f"{name} has nonpositive values in the fit window")
    log_t = np.log(times[mask])
    log_y = np.log(y[mask])
    slope, intercept = np.polyfit(log_t, log_y, 1)
    residual = float(np.sqrt(np.mean((log_y - (slope * log_t + intercept)) ** 2)))
    return SlopeFit(
        slope=float(slope),
        intercept=float(intercept),
        residual=residual,
        window=(float(start), float(end)),
        samples=int(mask.sum()),
        spans_decade=bool(end >= 10.0 * start),
    )


def instability_proxies(series: Series, t_burn: float = 10.0) -> InstabilityProxies:
    times = np.asarray(series["t"], dtype=float)
    d1rho = np.asarray(series["d1rho_l2"], dtype=float)
    grad_v = np.asarray(series["grad_v_sq"], dtype=float)
    surrogate = np.asarray(series["strat_surrogate"], dtype=float)

    after = times >= t_burn
    min_d1rho = float(np.min(d1rho[after])) if after.any() else float("nan")

    cumulative = sp_integrate.cumulative_trapezoid(grad_v, times, initial=0.0)
    boundaries = [t_burn / 10.0]
    while boundaries[-1] * 10.0 <= times[-1] * (1 + 1e-12):
        boundaries.append(boundaries[-1] * 10.0)
    boundaries = [b for b in boundaries if b >= times[0]]
    at = np.interp(boundaries, times, cumulative)
    increments = [float(x) for x in np.diff(at)]
    saturating = bool(len(increments) >= 2 and np.all(np.diff(increments) < 0))

    start = np.interp(t_burn, times, d1rho) ** 2, np.interp(t_burn, times, surrogate)
    end = d1rho[-1] ** 2, surrogate[-1]
    if start[1] == 0.0 or end[1] == 0.0 or start[0] == 0.0:
        growth = float("nan")
    else:
        growth = float((end[0] / end[1]) / (start[0] / start[1]))
    return InstabilityProxies(
        min_d1rho=min_d1rho,
        cumulative_gradv=cumulative,
        decade_increments=increments,
        saturating=saturating,
        lowerbound_growth_k1=growth,
    )


def energy_balance_residual(series: Series) -> float:
    """Relative defect of E_T(t) + int_0^t ||grad u||^2 = E_T(0) at the last sample."""
    t = np.asarray(series["t"], dtype=float)
    e_t = np.asarray(series["E_T"], dtype=float)
    dissipated = float(sp_integrate.trapezoid(np.asarray(series["grad_u_sq"], dtype=float), t))
    scale = abs(e_t[0]) if e_t[0] != 0 else 1.0
    return float(abs(e_t[-1] + dissipated - e_t[0]) / scale)
