"""Scenario files: one JSON document describes one model run.

A scenario names the model, the age grid, the input profiles and the time
horizon.  Profiles accept four spec forms::

    {"constant": 0.022}
    {"linear": {"intercept": -15000.0, "slope": 1000.0}}     # a + b*z
    {"piecewise": [[20, 0.0], [25, 0.08], [70, 0.0]]}        # nodes, interpolated
    {"csv": "attrition.csv"}                                 # 2 columns z,value

CSV paths are resolved relative to the scenario file.  Whatever the source
resolution, profiles are linearly interpolated onto the scenario grid.

See ``docs/scenario-schema.md`` for the full schema and worked examples.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .budget import BudgetParams, default_budget_dt
from .errors import InfeasibleCalibrationError, StepSizeError, ValidationError
from .numerics import (
    AgeGrid,
    AgeProfile,
    build_grid,
    integrate,
    interpolate_profile,
    normalize_distribution,
)
from .saturating import TECHNICAL_WINDOW, SaturatingParams, calibrate_alpha, recruitment_index

MODELS = ("saturating", "budget", "optimize")

# Profile roles each model requires (beyond attrition, which is universal).
_REQUIRED_PROFILES = {
    "saturating": ("hiring", "initial"),
    "budget": ("hiring", "cost", "initial"),
    "optimize": ("cost",),
}
_KNOWN_PROFILES = ("attrition", "hiring", "cost", "initial", "current_hiring")


@dataclass(frozen=True)
class Scenario:
    """A fully validated model configuration."""

    name: str
    model: str
    grid: AgeGrid
    mu: AgeProfile
    gamma: AgeProfile | None
    omega: AgeProfile | None
    rho0: AgeProfile | None
    current_hiring: AgeProfile | None
    alpha: float | None
    experience_total: float | None
    dt: float | None
    t_end: float
    snapshot_every: float | None
    beta: float | None
    notices: tuple[str, ...]
    source: str | None = None

    def saturating_params(self) -> SaturatingParams:
        if self.model != "saturating":
            raise ValidationError(f"scenario models {self.model}, not saturating")
        return SaturatingParams.build(self.alpha, self.mu, self.gamma)

    def budget_params(self) -> BudgetParams:
        if self.model != "budget":
            raise ValidationError(f"scenario models {self.model}, not budget")
        return BudgetParams.build(self.mu, self.gamma, self.omega)

    def effective_dt(self) -> float:
        """The step actually used when the file does not fix one."""
        if self.dt is not None:
            return self.dt
        if self.model == "budget":
            return default_budget_dt(self.budget_params())
        return self.grid.dz


def load_scenario(path: str | Path) -> Scenario:
    """Read, validate and grid-resolve one scenario file."""
    path = Path(path)
    if not path.is_file():
        raise ValidationError(f"scenario file not found: {path}", code="file-missing", path=str(path))
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ValidationError(f"not valid JSON ({exc})", code="bad-json", path=str(path)) from None
    if not isinstance(doc, dict):
        raise ValidationError("top level must be an object", code="bad-json", path=str(path))
    return _build_scenario(doc, base_dir=path.parent, source=str(path))


def scenario_from_dict(doc: dict, base_dir: str | Path = ".") -> Scenario:
    """Validate an in-memory scenario document (same rules as a file)."""
    return _build_scenario(doc, base_dir=Path(base_dir), source=None)


def save_scenario(scenario: Scenario, path: str | Path) -> Path:
    """Write a canonical copy: profiles expanded to explicit node lists.

    Loading the written file reproduces the scenario exactly (profiles are
    already on the grid, so interpolation is the identity).
    """
    path = Path(path)
    path.write_text(json.dumps(scenario_to_dict(scenario), indent=2, sort_keys=True) + "\n")
    return path


def scenario_to_dict(scenario: Scenario) -> dict:
    grid = scenario.grid

    def spec(profile: AgeProfile) -> dict:
        pairs = [[float(z), float(v)] for z, v in zip(grid.nodes, profile.values)]
        return {"piecewise": pairs}

    profiles: dict[str, dict] = {"attrition": spec(scenario.mu)}
    if scenario.gamma is not None:
        profiles["hiring"] = spec(scenario.gamma)
    if scenario.omega is not None:
        profiles["cost"] = spec(scenario.omega)
    if scenario.rho0 is not None:
        profiles["initial"] = spec(scenario.rho0)
    if scenario.current_hiring is not None:
        profiles["current_hiring"] = spec(scenario.current_hiring)

    doc: dict = {
        "name": scenario.name,
        "model": scenario.model,
        "grid": {"z_min": grid.z_min, "z_max": grid.z_max, "dz": grid.dz},
        "profiles": profiles,
    }
    if scenario.model == "saturating":
        doc["saturating"] = {"alpha": scenario.alpha}
    if scenario.model == "optimize":
        doc["optimize"] = {"experience_total": scenario.experience_total}
    time_block: dict = {"t_end": scenario.t_end}
    if scenario.dt is not None:
        time_block["dt"] = scenario.dt
    if scenario.snapshot_every is not None:
        time_block["snapshot_every"] = scenario.snapshot_every
    doc["time"] = time_block
    return doc


def _build_scenario(doc: dict, base_dir: Path, source: str | None) -> Scenario:
    notices: list[str] = []

    name = _require(doc, "name", str, "$.name")
    model = _require(doc, "model", str, "$.model")
    if model not in MODELS:
        raise ValidationError(
            f"unknown model {model!r}; expected one of {', '.join(MODELS)}",
            code="bad-model",
            path="$.model",
        )

    grid_block = _require(doc, "grid", dict, "$.grid")
    grid = build_grid(
        _number(grid_block, "z_min", "$.grid.z_min"),
        _number(grid_block, "z_max", "$.grid.z_max"),
        _number(grid_block, "dz", "$.grid.dz"),
    )

    profiles_block = _require(doc, "profiles", dict, "$.profiles")
    for key in profiles_block:
        if key not in _KNOWN_PROFILES:
            raise ValidationError(
                f"unknown profile {key!r}; expected one of {', '.join(_KNOWN_PROFILES)}",
                code="missing-field",
                path=f"$.profiles.{key}",
            )
    for key in ("attrition",) + _REQUIRED_PROFILES[model]:
        if key not in profiles_block:
            raise ValidationError(
                f"model {model!r} needs the {key!r} profile",
                code="missing-field",
                path=f"$.profiles.{key}",
            )
    if model != "optimize" and "current_hiring" in profiles_block:
        raise ValidationError(
            "current_hiring only applies to optimize scenarios",
            code="bad-profile-spec",
            path="$.profiles.current_hiring",
        )

    def profile(key: str) -> AgeProfile | None:
        if key not in profiles_block:
            return None
        return _resolve_profile(profiles_block[key], grid, base_dir, f"$.profiles.{key}")

    mu = profile("attrition")
    if np.any(mu.values < 0):
        raise ValidationError(
            "attrition must be nonnegative", code="bad-value", path="$.profiles.attrition"
        )

    gamma = profile("hiring")
    if gamma is not None:
        if np.any(gamma.values < 0):
            raise ValidationError(
                "hiring profile must be nonnegative", code="bad-value", path="$.profiles.hiring"
            )
        raw_mass = integrate(gamma)
        if raw_mass <= 0:
            raise ValidationError(
                "hiring profile carries no mass", code="bad-value", path="$.profiles.hiring"
            )
        if abs(raw_mass - 1.0) > 1e-9:
            notices.append(f"hiring profile mass {raw_mass:.6g} normalized to 1")
        gamma = normalize_distribution(gamma)

    omega = profile("cost")
    if omega is not None and np.any(omega.values < 0):
        raise ValidationError(
            "cost profile must be nonnegative", code="bad-value", path="$.profiles.cost"
        )

    rho0 = profile("initial")
    if rho0 is not None and np.any(rho0.values < 0):
        raise ValidationError(
            "initial density must be nonnegative", code="bad-value", path="$.profiles.initial"
        )

    current_hiring = profile("current_hiring")
    if current_hiring is not None and np.any(current_hiring.values < 0):
        raise ValidationError(
            "current hiring density must be nonnegative",
            code="bad-value",
            path="$.profiles.current_hiring",
        )

    alpha: float | None = None
    beta: float | None = None
    experience_total: float | None = None

    if model == "saturating":
        block = _require(doc, "saturating", dict, "$.saturating")
        has_alpha = "alpha" in block
        has_target = "p_eq_target" in block
        if has_alpha == has_target:
            raise ValidationError(
                "give exactly one of alpha or p_eq_target",
                code="conflicting-fields" if has_alpha else "missing-field",
                path="$.saturating",
            )
        beta = recruitment_index(mu, gamma)
        if has_alpha:
            alpha = _number(block, "alpha", "$.saturating.alpha")
            if alpha <= 0:
                raise ValidationError(
                    "alpha must be positive", code="bad-value", path="$.saturating.alpha"
                )
        else:
            target = _number(block, "p_eq_target", "$.saturating.p_eq_target")
            if beta <= 1.0:
                raise InfeasibleCalibrationError(
                    f"recruitment index beta = {beta:.6g} <= 1: no positive equilibrium "
                    f"exists, cannot calibrate to P_eq = {target:g}"
                )
            alpha = calibrate_alpha(beta, target)
            notices.append(
                f"calibrated alpha = {alpha:.12g} from beta = {beta:.12g} "
                f"for P_eq = {target:g}"
            )
        lo, hi = TECHNICAL_WINDOW
        if not (lo < beta < hi):
            notices.append(
                f"beta = {beta:.6g} outside the technical window ({lo:g}, {hi:g}); "
                "convergence diagnostics are observational"
            )
        # Constructing the params re-runs the model-level validation.
        SaturatingParams.build(alpha, mu, gamma)

    budget_params: BudgetParams | None = None
    if model == "budget":
        budget_params = BudgetParams.build(mu, gamma, omega)
        if not budget_params.assumption.holds:
            rep = budget_params.assumption
            notices.append(
                f"budget positivity assumption mu*omega >= omega' fails at age "
                f"{rep.worst_age:g} (margin {rep.worst_margin:.4g})"
            )

    if model == "optimize":
        block = _require(doc, "optimize", dict, "$.optimize")
        experience_total = _number(block, "experience_total", "$.optimize.experience_total")
        if experience_total <= 0:
            raise ValidationError(
                "experience_total must be positive",
                code="bad-value",
                path="$.optimize.experience_total",
            )
        if rho0 is not None and current_hiring is not None:
            raise ValidationError(
                "give at most one of initial (a density) and current_hiring (a hiring rate)",
                code="conflicting-fields",
                path="$.profiles",
            )

    time_block = doc.get("time", {})
    if not isinstance(time_block, dict):
        raise ValidationError("time block must be an object", code="bad-value", path="$.time")
    dt = _optional_number(time_block, "dt", "$.time.dt")
    t_end = _optional_number(time_block, "t_end", "$.time.t_end")
    snapshot_every = _optional_number(time_block, "snapshot_every", "$.time.snapshot_every")
    t_end = 100.0 if t_end is None else t_end
    for label, value in (("dt", dt), ("t_end", t_end), ("snapshot_every", snapshot_every)):
        if value is not None and not value > 0:
            raise ValidationError(
                f"{label} must be positive", code="bad-value", path=f"$.time.{label}"
            )

    if dt is not None and model in ("saturating", "budget"):
        _precheck_cfl(model, dt, grid, mu)

    return Scenario(
        name=name,
        model=model,
        grid=grid,
        mu=mu,
        gamma=gamma,
        omega=omega,
        rho0=rho0,
        current_hiring=current_hiring,
        alpha=alpha,
        experience_total=experience_total,
        dt=dt,
        t_end=t_end,
        snapshot_every=snapshot_every,
        beta=beta,
        notices=tuple(notices),
        source=source,
    )


def _precheck_cfl(model: str, dt: float, grid: AgeGrid, mu: AgeProfile) -> None:
    if model == "saturating":
        if dt > grid.dz * (1.0 + 1e-12):
            raise StepSizeError(
                f"time step {dt:g} violates the transport bound dt <= dz = {grid.dz:g}"
            )
        return
    mu_max = float(mu.values.max())
    if 1.0 - mu_max * dt - dt / grid.dz < -1e-12:
        bound = grid.dz / (1.0 + grid.dz * mu_max)
        raise StepSizeError(
            f"time step {dt:g} violates the stability bound "
            f"1 - max(mu)*dt - dt/dz >= 0 (requires dt <= {bound:g})"
        )


def cfl_margin(scenario: Scenario) -> tuple[float, float]:
    """(dt in effect, stability margin) for the scenario's model.

    The margin is dz - dt for the saturating scheme and
    1 - max(mu)*dt - dt/dz for the budget scheme; nonnegative means stable.
    """
    dt = scenario.effective_dt()
    if scenario.model == "budget":
        mu_max = float(scenario.mu.values.max())
        return dt, 1.0 - mu_max * dt - dt / scenario.grid.dz
    return dt, scenario.grid.dz - dt


def _resolve_profile(spec, grid: AgeGrid, base_dir: Path, path: str) -> AgeProfile:
    if not isinstance(spec, dict) or len(spec) != 1:
        raise ValidationError(
            "profile spec must be an object with exactly one of: "
            "constant, linear, piecewise, csv",
            code="bad-profile-spec",
            path=path,
        )
    (kind, payload), = spec.items()
    if kind == "constant":
        value = _as_number(payload, f"{path}.constant")
        return AgeProfile(grid, np.full(grid.n + 1, value))
    if kind == "linear":
        if not isinstance(payload, dict):
            raise ValidationError(
                "linear spec needs {intercept, slope}", code="bad-profile-spec", path=path
            )
        a = _number(payload, "intercept", f"{path}.linear.intercept")
        b = _number(payload, "slope", f"{path}.linear.slope")
        return AgeProfile(grid, a + b * grid.nodes)
    if kind == "piecewise":
        return _piecewise_profile(payload, grid, path)
    if kind == "csv":
        if not isinstance(payload, str):
            raise ValidationError("csv spec must be a path", code="bad-profile-spec", path=path)
        return _csv_profile(base_dir / payload, grid, path)
    raise ValidationError(
        f"unknown profile spec {kind!r}", code="bad-profile-spec", path=path
    )


def _piecewise_profile(payload, grid: AgeGrid, path: str) -> AgeProfile:
    if (
        not isinstance(payload, list)
        or len(payload) < 2
        or not all(isinstance(p, (list, tuple)) and len(p) == 2 for p in payload)
    ):
        raise ValidationError(
            "piecewise spec must be a list of at least two [age, value] pairs",
            code="bad-profile-spec",
            path=path,
        )
    xs = [_as_number(p[0], f"{path}[{i}][0]") for i, p in enumerate(payload)]
    ys = [_as_number(p[1], f"{path}[{i}][1]") for i, p in enumerate(payload)]
    if any(b <= a for a, b in zip(xs, xs[1:])):
        raise ValidationError(
            "piecewise ages must be strictly increasing", code="bad-profile-spec", path=path
        )
    return interpolate_profile(grid, xs, ys)


def _csv_profile(file_path: Path, grid: AgeGrid, path: str) -> AgeProfile:
    if not file_path.is_file():
        raise ValidationError(
            f"profile file not found: {file_path}", code="file-missing", path=path
        )
    xs: list[float] = []
    ys: list[float] = []
    with open(file_path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or len(header) < 2:
            raise ValidationError(
                f"{file_path}: expected a header row and two columns (z,value)",
                code="bad-value",
                path=path,
            )
        for i, row in enumerate(reader):
            if len(row) < 2:
                raise ValidationError(
                    f"{file_path}: row {i + 2} has fewer than two columns",
                    code="bad-value",
                    path=path,
                )
            try:
                xs.append(float(row[0]))
                ys.append(float(row[1]))
            except ValueError:
                raise ValidationError(
                    f"{file_path}: row {i + 2} is not numeric",
                    code="bad-value",
                    path=path,
                ) from None
    if len(xs) < 2:
        raise ValidationError(
            f"{file_path}: need at least two data rows", code="bad-value", path=path
        )
    if any(b <= a for a, b in zip(xs, xs[1:])):
        raise ValidationError(
            f"{file_path}: ages must be strictly increasing", code="bad-value", path=path
        )
    return interpolate_profile(grid, xs, ys)


def _require(doc: dict, key: str, typ: type, path: str):
    if key not in doc:
        raise ValidationError(f"missing required field", code="missing-field", path=path)
    value = doc[key]
    if not isinstance(value, typ) or (typ is not dict and isinstance(value, bool)):
        raise ValidationError(
            f"expected {typ.__name__}, got {type(value).__name__}",
            code="bad-value",
            path=path,
        )
    return value


def _number(block: dict, key: str, path: str) -> float:
    if key not in block:
        raise ValidationError("missing required field", code="missing-field", path=path)
    return _as_number(block[key], path)


def _optional_number(block: dict, key: str, path: str) -> float | None:
    if key not in block or block[key] is None:
        return None
    return _as_number(block[key], path)


def _as_number(value, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValidationError(
            f"expected a number, got {type(value).__name__}", code="bad-value", path=path
        )
    value = float(value)
    if not math.isfinite(value):
        raise ValidationError("expected a finite number", code="bad-value", path=path)
    return value
