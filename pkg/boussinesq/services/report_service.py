"""
Run reports: quantities derived from a diagnostics series.

The same derivation serves the live run and the CSV replay, so both produce
identical sections for identical series.
"""

import json
import math
from collections.abc import Iterable
from dataclasses import asdict
from pathlib import Path

import numpy as np

from ..exceptions import BoussinesqError
from ..numerics import functionals, odecheck

SLOPE_QUANTITIES = ("E_T", "dist_rearr", "strat_surrogate", "distance")
WINDOW_TIMES = (50.0, 100.0, 200.0)
ALL_CHECKS = ("slopes", "windows", "lyapunov", "instability", "ode")


def jsonable(value):
    """Replace non-finite floats by None and numpy scalars by Python ones."""
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return jsonable(value.tolist())
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, (np.integer, int)):
        return int(value)
    if isinstance(value, (np.floating, float)):
        value = float(value)
        return value if math.isfinite(value) else None
    return value


def _undefined(error: Exception) -> dict:
    return {"undefined": True, "reason": str(error)}


class ReportService:
    def slopes(self, series, fit_window: tuple[float, float]) -> dict:
        out = {}
        for name in SLOPE_QUANTITIES:
            try:
                out[name] = asdict(functionals.decay_slope(series, name, fit_window))
            except BoussinesqError as e:
                out[name] = _undefined(e)
        return out

    def windows(self, series) -> dict:
        times = series["t"]
        averages = {}
        for t in WINDOW_TIMES:
            try:
                averages[t] = functionals.window_average(series, "dissipation", t)
            except BoussinesqError:
                continue
        result: dict = {"dissipation": {f"{t:g}": v for t, v in averages.items()}}
        positive = {t: v for t, v in averages.items() if v > 0}
        if len(positive) >= 2:
            exponent, _ = np.polyfit(np.log(list(positive)), np.log(list(positive.values())), 1)
            result["exponent"] = float(exponent)
        else:
            result["exponent"] = None
        result["covered_until"] = float(times[-1]) if len(times) else None
        return result

    def lyapunov(self, series, c1: float | None = None) -> dict:
        try:
            minimal = functionals.minimal_lyapunov_C1(series)
        except BoussinesqError as e:
            return _undefined(e)
        used = c1 if c1 is not None else minimal
        nonincreasing = None
        if math.isfinite(used) and used >= 0:
            nonincreasing = functionals.lyapunov_nonincreasing(series, used)
        return {"minimal_c1": minimal, "c1": used, "nonincreasing": nonincreasing}

    def instability(self, series, t_burn: float) -> dict:
        try:
            proxies = functionals.instability_proxies(series, t_burn)
        except (BoussinesqError, ValueError, IndexError) as e:
            return _undefined(e)
        initial = float(series["d1rho_l2"][0])
        return {
            "min_d1rho": proxies.min_d1rho,
            "initial_d1rho": initial,
            "min_d1rho_ratio": proxies.min_d1rho / initial if initial > 0 else None,
            "gradv_integral": float(proxies.cumulative_gradv[-1]),
            "decade_increments": proxies.decade_increments,
            "saturating": proxies.saturating,
            "lowerbound_growth_k1": proxies.lowerbound_growth_k1,
        }

    def ode_verdicts(self, series) -> list[dict]:
        try:
            return [v.as_dict() for v in odecheck.run_series_verdicts(series)]
        except BoussinesqError as e:
            return [_undefined(e)]

    def derive(
        self,
        series,
        *,
        fit_window: tuple[float, float],
        t_burn: float = 10.0,
        c1: float | None = None,
        checks: Iterable[str] = ALL_CHECKS,
    ) -> dict:
        checks = list(checks)
        unknown = [c for c in checks if c not in ALL_CHECKS]
        if unknown:
            raise BoussinesqError(f"Unknown checks {unknown}; choose from {list(ALL_CHECKS)}")
        derived: dict = {}
        if "slopes" in checks:
            derived["slopes"] = self.slopes(series, fit_window)
        if "windows" in checks:
            derived["window_averages"] = self.windows(series)
        if "lyapunov" in checks:
            derived["lyapunov"] = self.lyapunov(series, c1)
        if "instability" in checks:
            derived["instability"] = self.instability(series, t_burn)
        if "ode" in checks:
            derived["ode_verdicts"] = self.ode_verdicts(series)
        if len(series["t"]) >= 2:
            derived["energy_balance_residual"] = functionals.energy_balance_residual(series)
        return jsonable(derived)

    def final_record(self, series) -> dict | None:
        if not len(series["t"]):
            return None
        return jsonable({name: series[name][-1] for name in functionals.COLUMNS})

    def write(self, path: str | Path, report: dict) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(jsonable(report), indent=2, sort_keys=True) + "\n")
        return path

    def read(self, path: str | Path) -> dict:
        return json.loads(Path(path).read_text())
