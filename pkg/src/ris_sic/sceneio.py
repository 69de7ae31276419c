"""File formats: scene descriptions, traces, campaigns, sweeps, snapshots.

Scene files are INI-style key/value documents with a fixed schema (see
``docs/scene_format.md``).  Result files are comma-separated tables prefixed
by ``# key: value`` header lines; all floats are written with 17 significant
digits so a write/read round trip reproduces every value bit-exactly.  Writes
go through a temp file plus atomic rename, so readers never observe a partial
file.
"""

from __future__ import annotations

import configparser
import os
import re
import tempfile
from dataclasses import dataclass
from pathlib import Path
from typing import TYPE_CHECKING, Mapping, Optional, Sequence, Union

import numpy as np

from .channel import (
    Calibration,
    CellParams,
    ClutterParams,
    Geometry,
    GridSpec,
    SceneParams,
)
from .model import RisConfig

if TYPE_CHECKING:  # pragma: no cover - typing only, avoids an import cycle
    from .experiment import CampaignResult, SweepPoint
    from .search import ConvergenceTrace

PathLike = Union[str, Path]

TRACE_MAGIC = "# ris-sic trace v1"
CAMPAIGN_MAGIC = "# ris-sic campaign v1"
SWEEP_MAGIC = "# ris-sic sweep v1"
SNAPSHOT_MAGIC = "# ris-sic snapshot v1"
CONFIG_MAGIC = "# ris-sic config v1"

# Keys whose values change between otherwise identical runs; byte-level
# reproducibility comparisons should ignore lines carrying these.
VOLATILE_HEADER_KEYS = ("created_utc",)


class SceneFormatError(ValueError):
    """Scene file violates the schema; message carries file/line context."""


class TraceIntegrityError(ValueError):
    """A loaded results table is internally inconsistent."""


# --------------------------------------------------------------------------
# scene files
# --------------------------------------------------------------------------

# section -> key -> (python type, attribute path)
SCENE_SCHEMA: dict[str, dict[str, type]] = {
    "geometry": {
        "nx": int,
        "ny": int,
        "pitch_m": float,
        "antenna_distance_m": float,
        "antenna_separation_m": float,
        "tx_gain_dbi": float,
        "rx_gain_dbi": float,
        "element_gain_dbi": float,
    },
    "cell": {
        "amplitude_on": float,
        "amplitude_off": float,
        "phase_target_deg": float,
        "quality_factor": float,
    },
    "calibration": {
        "alpha_iso_db": float,
        "p_tx_dbm": float,
    },
    "clutter": {
        "relative_power_db": float,
        "delay_spread_s": float,
        "taps": int,
        "seed": int,
    },
    "grid": {
        "center_hz": float,
        "bandwidth_hz": float,
        "points": int,
    },
}

_SECTION_TYPES = {
    "geometry": Geometry,
    "cell": CellParams,
    "calibration": Calibration,
    "clutter": ClutterParams,
    "grid": GridSpec,
}


def fmt_float(value: float) -> str:
    """Shortest decimal string that parses back to the identical float64."""
    return repr(float(value))


def _key_line_numbers(text: str) -> dict[tuple[str, str], int]:
    """Best-effort map from (section, key) to 1-based line number."""
    numbers: dict[tuple[str, str], int] = {}
    section = ""
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        m = re.match(r"\[(.+)\]\s*$", stripped)
        if m:
            section = m.group(1).strip()
            numbers[(section, "")] = lineno
            continue
        m = re.match(r"([^=:#;\s][^=:]*?)\s*[=:]", stripped)
        if m and not stripped.startswith(("#", ";")):
            numbers.setdefault((section, m.group(1).strip().lower()), lineno)
    return numbers


def parse_scene_text(text: str, source: str = "<string>") -> SceneParams:
    """Parse a scene document; reject unknown and missing keys with locations."""
    parser = configparser.ConfigParser(
        interpolation=None, inline_comment_prefixes=("#", ";"), strict=True
    )
    try:
        parser.read_string(text, source=source)
    except configparser.Error as exc:
        raise SceneFormatError(f"{source}: {exc}") from exc

    lines = _key_line_numbers(text)

    def _where(section: str, key: str = "") -> str:
        lineno = lines.get((section, key))
        return f"{source}:{lineno}" if lineno is not None else source

    for section in parser.sections():
        if section not in SCENE_SCHEMA:
            raise SceneFormatError(
                f"{_where(section)}: unknown section [{section}]; expected one of "
                f"{', '.join(SCENE_SCHEMA)}"
            )
        for key in parser[section]:
            if key not in SCENE_SCHEMA[section]:
                raise SceneFormatError(
                    f"{_where(section, key)}: unknown key '{key}' in [{section}]"
                )

    kwargs_by_section: dict[str, dict[str, object]] = {}
    for section, keys in SCENE_SCHEMA.items():
        if section not in parser:
            raise SceneFormatError(f"{source}: missing section [{section}]")
        values: dict[str, object] = {}
        for key, caster in keys.items():
            if key not in parser[section]:
                raise SceneFormatError(f"{source}: missing key '{key}' in [{section}]")
            raw = parser[section][key].strip()
            try:
                value = caster(raw)
            except ValueError as exc:
                raise SceneFormatError(
                    f"{_where(section, key)}: '{raw}' is not a valid "
                    f"{caster.__name__} for {section}.{key}"
                ) from exc
            if caster is float and value != value:  # NaN
                raise SceneFormatError(
                    f"{_where(section, key)}: {section}.{key} must not be NaN"
                )
            values[key] = value
        kwargs_by_section[section] = values

    try:
        return SceneParams(
            **{name: _SECTION_TYPES[name](**kw) for name, kw in kwargs_by_section.items()}
        )
    except ValueError as exc:
        raise SceneFormatError(f"{source}: {exc}") from exc


def parse_scene(path: PathLike) -> SceneParams:
    path = Path(path)
    return parse_scene_text(path.read_text(encoding="utf-8"), source=str(path))


def format_scene(params: SceneParams) -> str:
    sections = {
        "geometry": params.geometry,
        "cell": params.cell,
        "calibration": params.calibration,
        "clutter": params.clutter,
        "grid": params.grid,
    }
    out = []
    for section, obj in sections.items():
        out.append(f"[{section}]")
        for key, caster in SCENE_SCHEMA[section].items():
            value = getattr(obj, key)
            out.append(f"{key} = {value if caster is int else fmt_float(value)}")
        out.append("")
    return "\n".join(out)


def write_scene(params: SceneParams, path: PathLike) -> None:
    _atomic_write(path, format_scene(params))


def flatten_scene_params(params: SceneParams) -> dict[str, str]:
    """Stable ``section.key -> formatted value`` view (hashing, file headers)."""
    flat: dict[str, str] = {}
    sections = {
        "geometry": params.geometry,
        "cell": params.cell,
        "calibration": params.calibration,
        "clutter": params.clutter,
        "grid": params.grid,
    }
    for section, obj in sections.items():
        for key, caster in SCENE_SCHEMA[section].items():
            value = getattr(obj, key)
            flat[f"{section}.{key}"] = str(value) if caster is int else fmt_float(value)
    return flat


def scene_params_from_flat(flat: Mapping[str, str]) -> SceneParams:
    """Inverse of :func:`flatten_scene_params`."""
    by_section: dict[str, dict[str, object]] = {name: {} for name in SCENE_SCHEMA}
    for section, keys in SCENE_SCHEMA.items():
        for key, caster in keys.items():
            dotted = f"{section}.{key}"
            if dotted not in flat:
                raise SceneFormatError(f"missing scene entry '{dotted}'")
            by_section[section][key] = caster(flat[dotted])
    return SceneParams(
        **{name: _SECTION_TYPES[name](**kw) for name, kw in by_section.items()}
    )


# --------------------------------------------------------------------------
# low-level table plumbing
# --------------------------------------------------------------------------

def _atomic_write(path: PathLike, text: str) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=str(path.parent) or ".", prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def _header_lines(header: Mapping[str, str]) -> list[str]:
    return [f"# {key}: {value}" for key, value in header.items()]


def _read_table(path: PathLike, magic: str) -> tuple[dict[str, str], list[str], np.ndarray]:
    """Returns (header dict, column names, data array of shape (rows, cols))."""
    path = Path(path)
    lines = path.read_text(encoding="utf-8").splitlines()
    if not lines or lines[0].strip() != magic:
        raise TraceIntegrityError(
            f"{path}: not a '{magic.lstrip('# ')}' file (bad first line)"
        )
    header: dict[str, str] = {}
    columns: list[str] = []
    rows: list[list[float]] = []
    for lineno, line in enumerate(lines[1:], start=2):
        stripped = line.strip()
        if not stripped:
            continue
        if stripped.startswith("#"):
            body = stripped.lstrip("#").strip()
            if ":" in body:
                key, _, value = body.partition(":")
                if key.strip() == "columns":
                    columns = [c.strip() for c in value.split(",")]
                else:
                    header[key.strip()] = value.strip()
            continue
        try:
            rows.append([float(v) for v in stripped.split(",")])
        except ValueError as exc:
            raise TraceIntegrityError(f"{path}:{lineno}: bad data row: {stripped!r}") from exc
    if not columns:
        raise TraceIntegrityError(f"{path}: missing '# columns:' line")
    data = np.asarray(rows, dtype=np.float64)
    if data.size and data.shape[1] != len(columns):
        raise TraceIntegrityError(
            f"{path}: rows have {data.shape[1]} fields, columns line has {len(columns)}"
        )
    return header, columns, data


# --------------------------------------------------------------------------
# convergence traces
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class LoadedTrace:
    header: dict[str, str]
    iteration: np.ndarray
    evaluated_db: np.ndarray
    cumulative_db: np.ndarray


def write_trace(
    trace: "ConvergenceTrace", path: PathLike, header: Optional[Mapping[str, str]] = None
) -> None:
    """One row per evaluation: iteration (1-based), reading, running best.

    Wall-clock time is deliberately not serialized: apart from the
    ``created_utc`` stamp the bytes depend only on the run's inputs.
    """
    meta: dict[str, str] = {"algorithm": trace.algorithm}
    if trace.buffer_size is not None:
        meta["buffer_size"] = str(trace.buffer_size)
    if trace.stall_limit is not None:
        meta["stall_limit"] = str(trace.stall_limit)
    meta["iterations_total"] = str(trace.iterations_total)
    meta["final_db"] = fmt_float(trace.best_reading.magnitude_db)
    if header:
        meta.update({str(k): str(v) for k, v in header.items()})
    out = [TRACE_MAGIC, *_header_lines(meta), "# columns: iteration,evaluated_db,cumulative_db"]
    for i, (ev, cu) in enumerate(zip(trace.evaluated, trace.cumulative), start=1):
        out.append(f"{i},{fmt_float(ev)},{fmt_float(cu)}")
    _atomic_write(path, "\n".join(out) + "\n")


def read_trace(path: PathLike) -> LoadedTrace:
    """Load a trace table; rejects tampered cumulative columns."""
    header, columns, data = _read_table(path, TRACE_MAGIC)
    if columns != ["iteration", "evaluated_db", "cumulative_db"]:
        raise TraceIntegrityError(f"{path}: unexpected columns {columns}")
    if data.shape[0] < 1:
        raise TraceIntegrityError(f"{path}: empty trace")
    iteration = data[:, 0].astype(np.int64)
    evaluated = data[:, 1]
    cumulative = data[:, 2]
    if not np.array_equal(iteration, np.arange(1, data.shape[0] + 1)):
        raise TraceIntegrityError(f"{path}: iteration column must count 1..N")
    expected = np.minimum.accumulate(evaluated)
    if not np.array_equal(cumulative, expected):
        bad = int(np.nonzero(cumulative != expected)[0][0])
        raise TraceIntegrityError(
            f"{path}: cumulative column is not the running minimum "
            f"(first mismatch at iteration {bad + 1})"
        )
    return LoadedTrace(header, iteration, evaluated, cumulative)


# --------------------------------------------------------------------------
# configuration grids
# --------------------------------------------------------------------------

def format_config_grid(config: RisConfig, header: Optional[Mapping[str, str]] = None) -> str:
    out = [CONFIG_MAGIC]
    if header:
        out.extend(_header_lines(dict(header)))
    for row in config.states:
        out.append("".join("1" if v else "0" for v in row))
    return "\n".join(out) + "\n"


def write_config_grid(
    config: RisConfig, path: PathLike, header: Optional[Mapping[str, str]] = None
) -> None:
    _atomic_write(path, format_config_grid(config, header))


def parse_config_grid(text: str, source: str = "<string>") -> RisConfig:
    rows = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if set(stripped) - {"0", "1"}:
            raise SceneFormatError(f"{source}:{lineno}: config rows must be 0/1 strings")
        rows.append([c == "1" for c in stripped])
    if not rows:
        raise SceneFormatError(f"{source}: no configuration rows found")
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise SceneFormatError(f"{source}: config rows have inconsistent lengths")
    return RisConfig(np.asarray(rows, dtype=bool))


def read_config_grid(path: PathLike) -> RisConfig:
    path = Path(path)
    return parse_config_grid(path.read_text(encoding="utf-8"), source=str(path))


# --------------------------------------------------------------------------
# campaigns
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class LoadedCampaign:
    spec: "object"  # ris_sic.experiment.CampaignSpec
    spec_hash: str
    header: dict[str, str]
    mean_curve_db: np.ndarray
    final_values_db: np.ndarray


def write_campaign(result: "CampaignResult", path: PathLike) -> None:
    """Mean convergence curve plus enough metadata to re-run the campaign."""
    spec = result.spec
    meta: dict[str, str] = {
        "created_utc": result.created_utc,
        "spec_hash": result.spec_hash,
        "algorithm": spec.algorithm,
        "runs": str(spec.runs),
        "master_seed": str(spec.master_seed),
        "horizon": str(spec.horizon),
        "buffer_size": str(spec.buffer_size),
        "stall_limit": str(spec.stall_limit),
    }
    meta.update({f"scene.{k}": v for k, v in flatten_scene_params(spec.scene).items()})
    meta["final_median_db"] = fmt_float(result.final_median_db)
    meta["final_mean_db"] = fmt_float(result.final_mean_db)
    meta["final_best_db"] = fmt_float(result.final_best_db)
    meta["final_worst_db"] = fmt_float(result.final_worst_db)
    meta["final_values_db"] = ";".join(fmt_float(v) for v in result.final_values)
    out = [CAMPAIGN_MAGIC, *_header_lines(meta), "# columns: iteration,mean_cumulative_db"]
    for i, value in enumerate(result.mean_curve, start=1):
        out.append(f"{i},{fmt_float(value)}")
    _atomic_write(path, "\n".join(out) + "\n")


def read_campaign(path: PathLike) -> LoadedCampaign:
    from .experiment import CampaignSpec, campaign_spec_hash  # deferred: cycle

    header, columns, data = _read_table(path, CAMPAIGN_MAGIC)
    if columns != ["iteration", "mean_cumulative_db"]:
        raise TraceIntegrityError(f"{path}: unexpected columns {columns}")
    try:
        scene = scene_params_from_flat(
            {k[len("scene."):]: v for k, v in header.items() if k.startswith("scene.")}
        )
        spec = CampaignSpec(
            scene=scene,
            algorithm=header["algorithm"],
            runs=int(header["runs"]),
            master_seed=int(header["master_seed"]),
            horizon=int(header["horizon"]),
            buffer_size=int(header["buffer_size"]),
            stall_limit=int(header["stall_limit"]),
        )
    except (KeyError, ValueError) as exc:
        raise TraceIntegrityError(f"{path}: incomplete campaign header: {exc}") from exc
    recorded = header.get("spec_hash", "")
    if campaign_spec_hash(spec) != recorded:
        raise TraceIntegrityError(
            f"{path}: spec hash mismatch; header was edited or written by an "
            f"incompatible version"
        )
    if data.shape[0] != spec.horizon:
        raise TraceIntegrityError(
            f"{path}: {data.shape[0]} curve rows but horizon {spec.horizon}"
        )
    finals = np.asarray(
        [float(v) for v in header.get("final_values_db", "").split(";") if v],
        dtype=np.float64,
    )
    if finals.size != spec.runs:
        raise TraceIntegrityError(f"{path}: {finals.size} final values for {spec.runs} runs")
    return LoadedCampaign(
        spec=spec,
        spec_hash=recorded,
        header=header,
        mean_curve_db=data[:, 1],
        final_values_db=finals,
    )


# --------------------------------------------------------------------------
# bandwidth sweeps and transfer snapshots
# --------------------------------------------------------------------------

def write_sweep(
    rows: Sequence["SweepPoint"], path: PathLike, header: Optional[Mapping[str, str]] = None
) -> None:
    meta = dict(header) if header else {}
    out = [SWEEP_MAGIC, *_header_lines(meta)]
    out.append(
        "# columns: bandwidth_hz,points,runs,final_median_db,final_mean_db,"
        "final_best_db,final_worst_db"
    )
    for row in rows:
        out.append(
            f"{fmt_float(row.bandwidth_hz)},{row.points},{row.runs},"
            f"{fmt_float(row.final_median_db)},{fmt_float(row.final_mean_db)},"
            f"{fmt_float(row.final_best_db)},{fmt_float(row.final_worst_db)}"
        )
    _atomic_write(path, "\n".join(out) + "\n")


def write_snapshot(
    freqs_hz: np.ndarray,
    si_db: np.ndarray,
    path: PathLike,
    header: Optional[Mapping[str, str]] = None,
) -> None:
    meta = dict(header) if header else {}
    out = [SNAPSHOT_MAGIC, *_header_lines(meta), "# columns: frequency_hz,si_db"]
    for f, v in zip(freqs_hz, si_db):
        out.append(f"{fmt_float(f)},{fmt_float(v)}")
    _atomic_write(path, "\n".join(out) + "\n")


def read_snapshot(path: PathLike) -> tuple[dict[str, str], np.ndarray, np.ndarray]:
    header, columns, data = _read_table(path, SNAPSHOT_MAGIC)
    if columns != ["frequency_hz", "si_db"]:
        raise TraceIntegrityError(f"{path}: unexpected columns {columns}")
    return header, data[:, 0], data[:, 1]
