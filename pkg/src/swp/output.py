"""CSV persistence for simulation results and curve reports.

All numbers are written with ``repr``, so a write/read round trip is
bit-exact.  Column layouts are frozen and documented in
``docs/scenario-schema.md``; every file starts with a header row.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .errors import ValidationError
from .numerics import AgeProfile
from .results import SimulationResult

__all__ = [
    "write_columns",
    "read_columns",
    "write_profile",
    "write_timeseries",
    "read_timeseries",
]


def write_columns(path: str | Path, names: list[str], columns: list[np.ndarray]) -> Path:
    """Write named columns of equal length as CSV; returns the path."""
    if len(names) != len(columns):
        raise ValidationError("one name per column required")
    lengths = {len(c) for c in columns}
    if len(lengths) > 1:
        raise ValidationError(f"columns have unequal lengths {sorted(lengths)}")
    path = Path(path)
    rows = [",".join(names)]
    rows.extend(
        ",".join(repr(float(col[i])) for col in columns) for i in range(len(columns[0]) if columns else 0)
    )
    path.write_text("\n".join(rows) + "\n")
    return path


def read_columns(path: str | Path) -> dict[str, np.ndarray]:
    """Read a CSV written by :func:`write_columns` back into arrays."""
    path = Path(path)
    lines = path.read_text().splitlines()
    if not lines:
        raise ValidationError(f"{path}: empty file", code="bad-value")
    names = lines[0].split(",")
    data: list[list[float]] = [[] for _ in names]
    for i, line in enumerate(lines[1:]):
        parts = line.split(",")
        if len(parts) != len(names):
            raise ValidationError(f"{path}: row {i + 2} has {len(parts)} fields, expected {len(names)}")
        for store, text in zip(data, parts):
            store.append(float(text))
    return {name: np.array(vals) for name, vals in zip(names, data)}


def write_profile(path: str | Path, profile: AgeProfile, value_name: str = "value") -> Path:
    """One profile as (z, value) rows."""
    return write_columns(path, ["z", value_name], [profile.grid.nodes, np.asarray(profile.values)])


def _snapshot_name(t: float) -> str:
    return f"profile_t{t:g}.csv"


def write_timeseries(result: SimulationResult, out_dir: str | Path) -> list[Path]:
    """Write every series of a run into ``out_dir``; returns the file list.

    Always: ``headcount.csv`` and ``hiring.csv`` (with the three-term
    decomposition for budget runs) plus one ``profile_t<time>.csv`` per
    snapshot.  Budget runs add ``budget.csv`` and ``entropy.csv``.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    t = np.asarray(result.times)
    files = [write_columns(out / "headcount.csv", ["t", "headcount"], [t, np.asarray(result.headcount)])]

    hiring_names = ["t", "hiring"]
    hiring_cols = [t, np.asarray(result.hiring)]
    if result.hiring_parts is not None:
        for key in ("attrition", "retirement", "aging"):
            hiring_names.append(f"{key}_term")
            hiring_cols.append(np.asarray(result.hiring_parts[key]))
    files.append(write_columns(out / "hiring.csv", hiring_names, hiring_cols))

    if result.budget is not None:
        files.append(write_columns(out / "budget.csv", ["t", "budget"], [t, np.asarray(result.budget)]))
    if result.entropy is not None:
        files.append(write_columns(out / "entropy.csv", ["t", "entropy"], [t, np.asarray(result.entropy)]))

    for snap_t, snap in zip(result.snapshot_times, result.snapshots):
        files.append(write_profile(out / _snapshot_name(float(snap_t)), snap, value_name="rho"))
    return files


def read_timeseries(out_dir: str | Path) -> dict[str, dict[str, np.ndarray]]:
    """Read back everything :func:`write_timeseries` produced."""
    out = Path(out_dir)
    found: dict[str, dict[str, np.ndarray]] = {}
    for csv_path in sorted(out.glob("*.csv")):
        found[csv_path.name] = read_columns(csv_path)
    return found
