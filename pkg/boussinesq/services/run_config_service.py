"""
Run configuration: INI files validated by pydantic models.
"""

import configparser
from pathlib import Path
from typing import Literal

import numpy as np
from django.conf import settings
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from ..exceptions import BoussinesqError, ConfigError
from ..numerics.dynamics import HydrostaticProfile, InitialData, initial_data
from ..numerics.grid import ChannelGrid, build_grid
from .field_io_service import FieldIoService


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class GridSection(_Section):
    kmax: int = Field(ge=1)
    n2: int = Field(ge=9)


class ScenarioSection(_Section):
    kind: Literal["stable", "bubble", "custom"]
    eps: float = Field(default=0.01, ge=0.0)
    seed: int = Field(default=0, ge=0)
    bubble_sigma: float = Field(default=0.15, gt=0.0)
    bubble_lambda: float = Field(default=4.0, gt=0.0)
    initial_density: Path | None = None


class ProfileSection(_Section):
    kind: Literal["linear", "tabulated"] = "linear"
    alpha: float = 1.0
    table: Path | None = None


class TimeSection(_Section):
    dt: float | None = Field(default=None, gt=0.0)
    cfl_target: float = Field(default=0.5, gt=0.0, le=0.9)
    dt_max: float = Field(default=1e-2, gt=0.0)
    t_final: float = Field(gt=0.0)
    output_every: int = Field(default=10, ge=1)
    checkpoint_every: int = Field(default=0, ge=0)


class OutputSection(_Section):
    directory: Path | None = None


class AnalysisSection(_Section):
    c1: float | None = Field(default=None, gt=0.0)
    t_burn: float = Field(default=10.0, gt=0.0)
    fit_start: float = Field(default=25.0, gt=0.0)
    fit_end: float | None = Field(default=None, gt=0.0)
    resolution_tail_max: float = Field(default=1e-3, gt=0.0)
    rearrangement: Literal["cells", "interpolated"] = "interpolated"


class RunConfig(_Section):
    name: str = "run"
    grid: GridSection
    scenario: ScenarioSection
    profile: ProfileSection = ProfileSection()
    time: TimeSection
    output: OutputSection = OutputSection()
    analysis: AnalysisSection = AnalysisSection()

    @model_validator(mode="after")
    def _check_consistency(self) -> "RunConfig":
        if self.scenario.kind == "custom" and self.scenario.initial_density is None:
            raise ValueError("scenario.initial_density is required for custom scenarios")
        if self.profile.kind == "tabulated" and self.profile.table is None:
            raise ValueError("profile.table is required for tabulated profiles")
        if self.scenario.kind == "stable" and self.profile.kind == "linear" and not self.profile.alpha > 0:
            raise ValueError("stable scenarios need a linear profile with alpha > 0")
        if self.time.dt is not None and self.time.dt > self.time.t_final:
            raise ValueError("time.dt exceeds time.t_final")
        return self

    @property
    def fit_window(self) -> tuple[float, float]:
        return self.analysis.fit_start, self.analysis.fit_end or self.time.t_final


class RunConfigService:
    """Reads, validates and materialises run configurations."""

    def __init__(self, field_io: FieldIoService | None = None):
        self.field_io = field_io or FieldIoService()

    def parse(self, text: str, *, name: str = "run", base_dir: Path | None = None) -> RunConfig:
        parser = configparser.ConfigParser(interpolation=None)
        try:
            parser.read_string(text)
        except configparser.Error as e:
            raise ConfigError(f"Malformed config: {e}") from e

        raw: dict = {"name": name}
        for section in parser.sections():
            raw[section] = dict(parser.items(section))
        try:
            config = RunConfig.model_validate(raw)
        except ValidationError as e:
            problems = "; ".join(
                f"{'.'.join(str(p) for p in err['loc'])}: {err['msg']}" for err in e.errors()
            )
            raise ConfigError(f"Invalid config {name}: {problems}") from e
        return self._resolve_paths(config, base_dir) if base_dir else config

    def load(self, path: str | Path) -> RunConfig:
        path = Path(path)
        try:
            text = path.read_text()
        except OSError as e:
            raise ConfigError(f"Cannot read config {path}: {e}") from e
        return self.parse(text, name=path.stem, base_dir=path.resolve().parent)

    def _resolve_paths(self, config: RunConfig, base_dir: Path) -> RunConfig:
        def resolve(p: Path | None) -> Path | None:
            if p is None or p.is_absolute():
                return p
            return base_dir / p

        return config.model_copy(
            update={
                "scenario": config.scenario.model_copy(
                    update={"initial_density": resolve(config.scenario.initial_density)}
                ),
                "profile": config.profile.model_copy(update={"table": resolve(config.profile.table)}),
                "output": config.output.model_copy(update={"directory": resolve(config.output.directory)}),
            }
        )

    def with_eps(self, config: RunConfig, eps: float, *, name: str | None = None) -> RunConfig:
        if eps < 0:
            raise ConfigError(f"eps must be >= 0, got {eps}")
        return config.model_copy(
            update={
                "name": name or f"{config.name}-eps{eps:g}",
                "scenario": config.scenario.model_copy(update={"eps": float(eps)}),
            }
        )

    def as_dict(self, config: RunConfig) -> dict:
        return config.model_dump(mode="json")

    def output_dir(self, config: RunConfig, override: str | Path | None = None) -> Path:
        if override is not None:
            return Path(override)
        if config.output.directory is not None:
            return config.output.directory
        return Path(settings.BOUSSINESQ_OUTPUT_ROOT) / config.name

    def build_grid(self, config: RunConfig) -> ChannelGrid:
        return build_grid(config.grid.kmax, config.grid.n2)

    def build_profile(self, config: RunConfig, grid: ChannelGrid) -> HydrostaticProfile:
        if config.profile.kind == "linear":
            profile = HydrostaticProfile.linear(grid, config.profile.alpha)
        else:
            x2, rho = self.field_io.load_profile_table(config.profile.table)
            try:
                profile = HydrostaticProfile.tabulated(grid, x2, rho)
            except BoussinesqError as e:
                raise ConfigError(f"Bad profile table {config.profile.table}: {e}") from e
        if config.scenario.kind == "stable" and not profile.is_stable:
            raise ConfigError(
                f"stable scenarios need a strictly decreasing profile (gamma={profile.gamma:.3g})"
            )
        return profile

    def build_initial_data(self, config: RunConfig) -> InitialData:
        grid = self.build_grid(config)
        profile = self.build_profile(config, grid)
        density = None
        if config.scenario.kind == "custom":
            density = self.field_io.load_field(config.scenario.initial_density, grid)
        data = initial_data(
            config.scenario.kind,
            config.scenario.eps,
            profile,
            grid,
            sigma=config.scenario.bubble_sigma,
            lam=config.scenario.bubble_lambda,
            density=None if density is None else np.asarray(density.values),
        )
        data.metadata["seed"] = config.scenario.seed
        return data
