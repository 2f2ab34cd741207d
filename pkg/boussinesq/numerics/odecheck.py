"""
Sampled-data checkers for four elementary ODE decay lemmas.

Each checker first tests the lemma's hypotheses on the samples, then reports
the smallest constant for which the conclusion holds. Lemma constants are not
explicit, so a verdict passes when that minimal constant is at most the
caller's acceptance constant.
"""

from collections.abc import Callable, Mapping
from dataclasses import dataclass, field
from typing import Literal

import numpy as np
from scipy import integrate as sp_integrate

from ..exceptions import PreconditionError
from .functionals import Series, quantity, window_averages

HypothesisStatus = Literal["ok", "hypothesis-violated"]

DERIVATIVE_SLACK = 1e-6
WINDOW_SLACK = 1e-3
DEFAULT_CONSTANT = 10.0


@dataclass(frozen=True)
class SampledTrajectory:
    times: np.ndarray
    values: Mapping[str, np.ndarray]

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        if times.ndim != 1 or times.size < 3:
            raise PreconditionError("a trajectory needs at least three samples")
        if np.any(np.diff(times) <= 0):
            raise PreconditionError("trajectory times must be strictly increasing")
        values = {}
        for name, column in self.values.items():
            column = np.asarray(column, dtype=float)
            if column.shape != times.shape:
                raise PreconditionError(f"column {name!r} has {column.size} samples, expected {times.size}")
            if np.any(column < 0):
                raise PreconditionError(f"column {name!r} must be nonnegative")
            values[name] = column
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)

    def __getitem__(self, name: str) -> np.ndarray:
        try:
            return self.values[name]
        except KeyError:
            raise PreconditionError(f"trajectory has no column {name!r}") from None

    @property
    def t_final(self) -> float:
        return float(self.times[-1])

    @classmethod
    def from_series(cls, series: Series, **columns: str) -> "SampledTrajectory":
        """Pick run-series quantities as lemma functions, e.g. f="dissipation"."""
        return cls(
            times=np.asarray(series["t"], dtype=float),
            values={role: quantity(series, name) for role, name in columns.items()},
        )


@dataclass(frozen=True)
class Verdict:
    name: str
    hypothesis_status: HypothesisStatus
    minimal_constant: float
    constant: float
    violations: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool | None:
        """None when the hypotheses do not hold on the samples."""
        if self.hypothesis_status != "ok":
            return None
        return bool(self.minimal_constant <= self.constant)

    @property
    def status(self) -> str:
        if self.passed is None:
            return "hypothesis-violated"
        return "pass" if self.passed else "fail"

    def to_text(self) -> str:
        lines = [
            f"name: {self.name}",
            f"hypothesis: {self.hypothesis_status}",
            f"minimal_constant: {self.minimal_constant:.6g}",
            f"constant: {self.constant:.6g}",
            f"result: {self.status}",
        ]
        lines.extend(f"violation: {v}" for v in self.violations)
        return "\n".join(lines)

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "hypothesis_status": self.hypothesis_status,
            "minimal_constant": self.minimal_constant,
            "constant": self.constant,
            "status": self.status,
            "violations": list(self.violations),
        }


def _ratio(numerator: float, denominator: float) -> float:
    if denominator > 0:
        return float(numerator / denominator)
    return 0.0 if numerator <= 0 else float("inf")


def _derivative_violations(times: np.ndarray, lhs_of: np.ndarray, bound: np.ndarray, label: str) -> list[str]:
    """Check d/dt lhs_of <= bound on interior samples by centered differences."""
    derivative = np.gradient(lhs_of, times)
    finite_bound = bound[np.isfinite(bound)]
    scale = max(
        float(np.max(np.abs(lhs_of))),
        float(np.max(np.abs(finite_bound))) if finite_bound.size else 0.0,
        np.finfo(float).tiny,
    )
    excess = derivative[1:-1] - bound[1:-1] - DERIVATIVE_SLACK * scale
    bad = np.nonzero(excess > 0)[0]
    if bad.size == 0:
        return []
    first = bad[0] + 1
    return [f"{label} fails at {bad.size} samples, first t={times[first]:.6g}"]


def _window_times(times: np.ndarray, start: float = 0.0) -> np.ndarray:
    lower = max(2.0 * times[0], start)
    return times[(times >= lower) & (times > 0)]


def _window_violations(
    times: np.ndarray, values: np.ndarray, ends: np.ndarray, bound: np.ndarray, label: str
) -> list[str]:
    if ends.size == 0:
        return []
    averages = window_averages(times, values, ends)
    bad = np.nonzero(averages > bound * (1.0 + WINDOW_SLACK) + np.finfo(float).tiny)[0]
    if bad.size == 0:
        return []
    return [f"{label} fails at {bad.size} window ends, first t={ends[bad[0]]:.6g}"]


def _status(violations: list[str]) -> HypothesisStatus:
    return "ok" if not violations else "hypothesis-violated"


def check_lemma_A1(traj: SampledTrajectory, C: float = DEFAULT_CONSTANT) -> Verdict:
    """d/dt(f+g) <= -(f^2/alpha + g) implies f(T)+g(T) <= C A / T^2."""
    t = traj.times
    f, g, alpha = traj["f"], traj["g"], traj["alpha"]
    if t[-1] <= 0:
        raise PreconditionError("final time must be positive")
    f_sq_over_alpha = np.divide(f**2, alpha, out=np.where(f > 0, np.inf, 0.0), where=alpha > 0)
    violations = _derivative_violations(t, f + g, -(f_sq_over_alpha + g), "d/dt(f+g) <= -(f^2/alpha+g)")
    A = max(float(sp_integrate.trapezoid(alpha, t)), float(f[0] + g[0]))
    T = float(t[-1])
    minimal = _ratio(float(f[-1] + g[-1]) * T**2, A)
    return Verdict("lemma_A1", _status(violations), minimal, float(C), violations)


def check_lemma_A2(
    traj: SampledTrajectory, A: float, n: int, constant: float = DEFAULT_CONSTANT
) -> Verdict:
    """f' <= -g + h with windowed decay of f and h bounds the windowed average of g."""
    if A <= 0:
        raise PreconditionError("A must be positive")
    t = traj.times
    f, g, h = traj["f"], traj["g"], traj["h"]
    violations = _derivative_violations(t, f, h - g, "d/dt f <= -g + h")
    ends = _window_times(t)
    violations += _window_violations(t, f, ends, A / ends ** (n - 1), "f window decay")
    violations += _window_violations(t, h, ends, A / ends**n, "h window decay")
    minimal = 0.0
    if ends.size:
        minimal = float(np.max(window_averages(t, g, ends) * ends**n)) / A
    return Verdict("lemma_A2", _status(violations), minimal, float(constant), violations)


def check_lemma_A3(
    traj: SampledTrajectory, A: float, n: int, constant: float = DEFAULT_CONSTANT
) -> Verdict:
    """f' <= -f + g with windowed decay of g bounds the windowed average of f by (A+B)/t^n."""
    if A <= 0:
        raise PreconditionError("A must be positive")
    t = traj.times
    f, g = traj["f"], traj["g"]
    violations = _derivative_violations(t, f, g - f, "d/dt f <= -f + g")
    ends = _window_times(t)
    violations += _window_violations(t, g, ends, A / ends**n, "g window decay")
    B = float(f[0] + sp_integrate.trapezoid(g, t))
    minimal = 0.0
    if ends.size:
        minimal = float(np.max(window_averages(t, f, ends) * ends**n)) / (A + B)
    return Verdict("lemma_A3", _status(violations), minimal, float(constant), violations)


def check_lemma_A4(
    traj: SampledTrajectory, E: float, n: float, alpha: float, constant: float = DEFAULT_CONSTANT
) -> Verdict:
    """Windowed decay E/t^n on [2, T] bounds int_1^T f^alpha by C E^alpha for alpha in (1/n, 1]."""
    if not n > 1:
        raise PreconditionError(f"n must exceed 1, got {n}")
    if not 1.0 / n < alpha <= 1.0:
        raise PreconditionError(f"alpha must lie in (1/n, 1], got alpha={alpha}, n={n}")
    if E < 0:
        raise PreconditionError("E must be nonnegative")
    t = traj.times
    if t[-1] <= 2.0:
        raise PreconditionError("final time must exceed 2")
    if t[0] > 1.0:
        raise PreconditionError("samples must start at or before t = 1")
    f = traj["f"]
    ends = _window_times(t, start=2.0)
    violations = _window_violations(t, f, ends, E / ends**n, "f window decay")

    mask = t > 1.0
    ts = np.concatenate([[1.0], t[mask]])
    ys = np.concatenate([[np.interp(1.0, t, f)], f[mask]]) ** alpha
    integral = float(sp_integrate.trapezoid(ys, ts))
    minimal = _ratio(integral, E**alpha)
    return Verdict("lemma_A4", _status(violations), minimal, float(constant), violations)


def smallest_decay_constant(traj: SampledTrajectory, n: float, role: str = "f") -> float:
    """Smallest E with (2/t) int_{t/2}^t f <= E / t^n at every window end in [2, T]."""
    ends = _window_times(traj.times, start=2.0)
    if ends.size == 0:
        return 0.0
    return float(np.max(window_averages(traj.times, traj[role], ends) * ends**n))


def weighted_trajectory(traj: SampledTrajectory, power: float, role: str = "f") -> SampledTrajectory:
    """The same trajectory with f replaced by t^power f."""
    return SampledTrajectory(traj.times, {**traj.values, role: traj.times**power * traj[role]})


# -- synthetic families ------------------------------------------------------


@dataclass(frozen=True)
class SyntheticCase:
    name: str
    expected: str
    run: Callable[[], Verdict]


def _grid(start: float, stop: float, samples: int) -> np.ndarray:
    return np.linspace(start, stop, samples)


def _a1_decaying(samples: int) -> Verdict:
    t = _grid(0.0, 10.0, samples)
    e = np.exp(-t)
    return check_lemma_A1(SampledTrajectory(t, {"f": e, "g": e, "alpha": np.ones_like(t)}))


def _a1_zero(samples: int) -> Verdict:
    t = _grid(0.0, 10.0, samples)
    z = np.zeros_like(t)
    return check_lemma_A1(SampledTrajectory(t, {"f": z, "g": z, "alpha": np.ones_like(t)}))


def _a1_constant(samples: int) -> Verdict:
    t = _grid(0.0, 10.0, samples)
    return check_lemma_A1(SampledTrajectory(t, {"f": np.zeros_like(t), "g": np.ones_like(t), "alpha": np.ones_like(t)}))


def _a2_power_law(samples: int) -> Verdict:
    t = _grid(2.0, 100.0, samples)
    traj = SampledTrajectory(t, {"f": 1.0 / t**2, "g": 2.0 / t**3, "h": np.zeros_like(t)})
    return check_lemma_A2(traj, A=2.5, n=3)


def _a2_zero(samples: int) -> Verdict:
    t = _grid(2.0, 100.0, samples)
    z = np.zeros_like(t)
    return check_lemma_A2(SampledTrajectory(t, {"f": z, "g": z, "h": z}), A=1.0, n=3)


def _a2_late_spike(samples: int) -> Verdict:
    t = _grid(2.0, 100.0, samples)
    spike = np.exp(-(((t - 80.0) / 2.0) ** 2))
    traj = SampledTrajectory(t, {"f": 1.0 / t**2, "g": 2.0 / t**3 + spike, "h": spike})
    return check_lemma_A2(traj, A=2.5, n=3)


def _a3_exponential(samples: int) -> Verdict:
    t = _grid(0.0, 30.0, samples)
    traj = SampledTrajectory(t, {"f": np.exp(-t), "g": np.zeros_like(t)})
    return check_lemma_A3(traj, A=1.0, n=2)


def _a3_zero(samples: int) -> Verdict:
    t = _grid(0.0, 30.0, samples)
    z = np.zeros_like(t)
    return check_lemma_A3(SampledTrajectory(t, {"f": z, "g": z}), A=1.0, n=2)


def _a3_constant(samples: int) -> Verdict:
    t = _grid(0.0, 30.0, samples)
    one = np.ones_like(t)
    return check_lemma_A3(SampledTrajectory(t, {"f": one, "g": one}), A=1.0, n=2)


def _a4_power_law(samples: int) -> Verdict:
    t = _grid(1.0, 100.0, samples)
    return check_lemma_A4(SampledTrajectory(t, {"f": 1.0 / t**2}), E=2.5, n=2, alpha=1.0)


def _a4_zero(samples: int) -> Verdict:
    t = _grid(1.0, 100.0, samples)
    return check_lemma_A4(SampledTrajectory(t, {"f": np.zeros_like(t)}), E=1.0, n=2, alpha=1.0)


def _a4_harmonic(samples: int) -> Verdict:
    t = _grid(1.0, 100.0, samples)
    return check_lemma_A4(SampledTrajectory(t, {"f": 1.0 / t}), E=2.0, n=2, alpha=1.0)


TIGHT_CONSTANT = 0.1


def _a1_short_horizon(samples: int) -> Verdict:
    # (f+g)(T) T^2 / A = 2 e^-2 * 4 / 2 ~ 0.54
    t = _grid(0.0, 2.0, samples)
    e = np.exp(-t)
    traj = SampledTrajectory(t, {"f": e, "g": e, "alpha": np.ones_like(t)})
    return check_lemma_A1(traj, TIGHT_CONSTANT)


def _a2_tight(samples: int) -> Verdict:
    # windowed g is 6 / t^3, so the minimal constant is 6 / A = 2.4
    t = _grid(2.0, 100.0, samples)
    traj = SampledTrajectory(t, {"f": 1.0 / t**2, "g": 2.0 / t**3, "h": np.zeros_like(t)})
    return check_lemma_A2(traj, A=2.5, n=3, constant=1.0)


def _a3_tight(samples: int) -> Verdict:
    t = _grid(0.0, 30.0, samples)
    traj = SampledTrajectory(t, {"f": np.exp(-t), "g": np.zeros_like(t)})
    return check_lemma_A3(traj, A=1.0, n=2, constant=TIGHT_CONSTANT)


def _a4_tight(samples: int) -> Verdict:
    # int_1^100 t^-2 / E ~ 0.4
    t = _grid(1.0, 100.0, samples)
    return check_lemma_A4(SampledTrajectory(t, {"f": 1.0 / t**2}), E=2.5, n=2, alpha=1.0, constant=TIGHT_CONSTANT)


SYNTHETIC_FAMILIES: dict[str, tuple[str, Callable[[int], Verdict]]] = {
    "A1 exponential": ("pass", _a1_decaying),
    "A1 zero": ("pass", _a1_zero),
    "A1 constant": ("hypothesis-violated", _a1_constant),
    "A1 short horizon": ("fail", _a1_short_horizon),
    "A2 power law": ("pass", _a2_power_law),
    "A2 zero": ("pass", _a2_zero),
    "A2 late spike": ("hypothesis-violated", _a2_late_spike),
    "A2 tight constant": ("fail", _a2_tight),
    "A3 exponential": ("pass", _a3_exponential),
    "A3 zero": ("pass", _a3_zero),
    "A3 constant": ("hypothesis-violated", _a3_constant),
    "A3 tight constant": ("fail", _a3_tight),
    "A4 power law": ("pass", _a4_power_law),
    "A4 zero": ("pass", _a4_zero),
    "A4 harmonic": ("hypothesis-violated", _a4_harmonic),
    "A4 tight constant": ("fail", _a4_tight),
}


def synthetic_suite(samples: int = 4001) -> list[SyntheticCase]:
    return [
        SyntheticCase(name, expected, lambda build=build: build(samples))
        for name, (expected, build) in SYNTHETIC_FAMILIES.items()
    ]


# -- application to run series -------------------------------------------------


def run_series_verdicts(series: Series, constant: float = DEFAULT_CONSTANT) -> list[Verdict]:
    """Apply the integrability lemma to the dissipation and its t^(1/4)-weighted version."""
    times = np.asarray(series["t"], dtype=float)
    if times.size < 3 or times[-1] <= 2.0 or times[0] > 1.0:
        return []
    traj = SampledTrajectory.from_series(series, f="dissipation")
    weighted = weighted_trajectory(traj, 0.25)
    verdicts = []
    for label, base, n, alpha in (
        ("dissipation", traj, 3.0, 0.5),
        ("weighted dissipation", weighted, 2.75, 0.4),
    ):
        E = smallest_decay_constant(base, n)
        verdict = check_lemma_A4(base, E=E, n=n, alpha=alpha, constant=constant)
        verdicts.append(
            Verdict(
                f"lemma_A4 {label}",
                verdict.hypothesis_status,
                verdict.minimal_constant,
                verdict.constant,
                verdict.violations,
            )
        )
    return verdicts
