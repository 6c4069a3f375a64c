"""Project configuration, dataset loading and CSV serialization.

A project is a YAML file naming the data tables it uses plus a few
analysis settings. Every table is a comma-separated file with a header row
and units in the column names. Loading parses every table, checks that the
tables refer to each other consistently and returns an immutable
:class:`Project`. The electricity-mix table is only read when a command
needs it.
"""

from __future__ import annotations

import csv
import io
import math
import os
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from types import MappingProxyType
from typing import Any, Callable, Iterable, Mapping, Sequence, TextIO

import yaml

from .errors import ConfigurationError, LinkError, SchemaError
from .infra_allocation import InfrastructureAsset, TrafficRecord, infra_ef_table, traffic_for_year
from .mode_factors import (
    ElectricityMix,
    EmissionFactor,
    ModeProfile,
    ServicingScenario,
    UseProfile,
    VehicleProfile,
    factor_table,
)
from .scenarios import Study
from .street_inventory import FlowVector, Layer, StreetSpec
from .survey_shift import (
    DEFAULT_WALK_SPEED,
    FFES,
    DeltaPkt,
    ModeKinematics,
    SurveyRecord,
    aggregate,
    clean,
    scale_survey_sums,
)

DATA_DIR_ENV = "CLCA_DATA_DIR"
PROJECT_FILE = "project.yaml"


# ---------------------------------------------------------------- numbers

def format_number(x: float, fixture_diff: bool = False) -> str:
    """Scientific notation; 17 significant digits so that reading back is exact.

    ``fixture_diff`` rounds to three significant figures, the precision of
    the reference tables.
    """
    x = float(x) + 0.0  # folds -0.0 into 0.0
    if fixture_diff:
        return f"{x:.2E}"
    return f"{x:.16e}"


def round_sig(x: float, digits: int = 3) -> float:
    return float(f"{float(x):.{digits - 1}e}")


def _parse_float(text: str) -> float:
    value = float(text.strip())
    if not math.isfinite(value):
        raise ValueError(f"{text!r} is not finite")
    return value


def _parse_optional_float(text: str) -> float | None:
    return None if not text.strip() else _parse_float(text)


def _parse_int(text: str) -> int:
    return int(text.strip())


def _parse_optional_int(text: str) -> int | None:
    return None if not text.strip() else _parse_int(text)


def _parse_str(text: str) -> str:
    value = text.strip()
    if not value:
        raise ValueError("empty value")
    return value


def _parse_optional_str(text: str) -> str | None:
    return text.strip() or None


def _parse_bool(text: str) -> bool:
    folded = text.strip().casefold()
    if folded in ("", "0", "false", "no", "n"):
        return False
    if folded in ("1", "true", "yes", "y"):
        return True
    raise ValueError(f"{text!r} is not a boolean")


# ---------------------------------------------------------------- CSV

def read_table(
    path: str | Path,
    columns: Mapping[str, Callable[[str], Any]],
    optional: Mapping[str, str] | None = None,
) -> list[dict[str, Any]]:
    """Parse a CSV file into dicts, one parser per column.

    ``optional`` maps columns that may be absent to the text used in their
    place. Errors name the file, the line number and the column.
    """
    path = Path(path)
    optional = dict(optional or {})
    try:
        handle = path.open(newline="", encoding="utf-8")
    except OSError as exc:
        raise SchemaError(path, None, None, f"cannot read file ({exc.strerror})") from None
    with handle:
        reader = csv.DictReader(handle)
        header = reader.fieldnames
        if not header:
            raise SchemaError(path, 1, None, "missing header row")
        for name in columns:
            if name not in header and name not in optional:
                raise SchemaError(path, 1, name, "required column is missing")
        rows = []
        for raw in reader:
            line = reader.line_num
            if None in raw:
                raise SchemaError(path, line, None, "more fields than header columns")
            row = {}
            for name, parse in columns.items():
                text = raw.get(name)
                if text is None:
                    text = optional.get(name, "")
                try:
                    row[name] = parse(text)
                except (TypeError, ValueError) as exc:
                    raise SchemaError(path, line, name, str(exc) or f"cannot parse {text!r}") from None
            rows.append(row)
    return rows


def write_table(
    header: Sequence[str],
    rows: Iterable[Sequence[Any]],
    stream: TextIO,
    fixture_diff: bool = False,
) -> None:
    """Write rows as CSV; floats go through :func:`format_number`."""
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow(format_number(v, fixture_diff) if isinstance(v, float) else v for v in row)


def table_to_text(header: Sequence[str], rows: Iterable[Sequence[Any]], fixture_diff: bool = False) -> str:
    buf = io.StringIO()
    write_table(header, rows, buf, fixture_diff)
    return buf.getvalue()


# ---------------------------------------------------------------- datasets

def load_kinematics(path: str | Path) -> dict[str, ModeKinematics]:
    rows = read_table(path, {"mode": _parse_str, "speed_kmh": _parse_float, "access_walk_m": _parse_float})
    out = {}
    for line, r in enumerate(rows, start=2):
        if r["mode"] in out:
            raise SchemaError(path, line, "mode", f"duplicate mode {r['mode']!r}")
        try:
            out[r["mode"]] = ModeKinematics(r["mode"], r["speed_kmh"], r["access_walk_m"])
        except ValueError as exc:
            raise SchemaError(path, line, None, str(exc)) from None
    return out


def load_survey_sums(path: str | Path) -> dict[str, float]:
    rows = read_table(path, {"mode": _parse_str, "survey_sum_km": _parse_float})
    out: dict[str, float] = {}
    for line, r in enumerate(rows, start=2):
        if r["mode"] in out:
            raise SchemaError(path, line, "mode", f"duplicate mode {r['mode']!r}")
        out[r["mode"]] = r["survey_sum_km"]
    return out


SURVEY_COLUMNS = {
    "id": _parse_str,
    "frequency": _parse_str,
    "original_mode": _parse_optional_str,
    "original_duration_min": _parse_float,
    "ffes_access_walk_min": _parse_float,
    "ffes_trip_distance_km": _parse_float,
    "ffes_trip_duration_min": _parse_float,
    "induced": _parse_bool,
    "intermodal": _parse_bool,
}


def load_survey(path: str | Path) -> list[SurveyRecord]:
    """Raw survey records, one trip per row."""
    rows = read_table(path, SURVEY_COLUMNS, optional={"induced": "", "intermodal": ""})
    records = []
    for line, r in enumerate(rows, start=2):
        try:
            records.append(SurveyRecord(
                r["id"], r["frequency"], r["original_mode"], r["original_duration_min"],
                r["ffes_access_walk_min"], r["ffes_trip_distance_km"], r["ffes_trip_duration_min"],
                induced=r["induced"], intermodal=r["intermodal"],
            ))
        except ValueError as exc:
            raise SchemaError(path, line, None, str(exc)) from None
    return records


def load_profiles(path: str | Path) -> dict[str, ModeProfile]:
    rows = read_table(path, {
        "mode": _parse_str,
        "ef_one_vehicle_kg": _parse_optional_float,
        "lifetime_km": _parse_optional_float,
        "occupancy": _parse_optional_float,
        "exhaust_kg_pkt": _parse_float,
        "upstream_kg_pkt": _parse_float,
        "electricity_kwh_pkt": _parse_float,
        "servicing_scenario": _parse_optional_str,
    })
    out = {}
    for line, r in enumerate(rows, start=2):
        mode = r["mode"]
        if mode in out:
            raise SchemaError(path, line, "mode", f"duplicate mode {mode!r}")
        vehicle_cells = (r["ef_one_vehicle_kg"], r["lifetime_km"])
        if (vehicle_cells[0] is None) != (vehicle_cells[1] is None):
            raise SchemaError(path, line, "lifetime_km", "give both ef_one_vehicle_kg and lifetime_km or neither")
        try:
            vehicle = None
            if vehicle_cells[0] is not None:
                occupancy = 1.0 if r["occupancy"] is None else r["occupancy"]
                vehicle = VehicleProfile(mode, r["ef_one_vehicle_kg"], r["lifetime_km"], occupancy)
            use = UseProfile(mode, r["exhaust_kg_pkt"], r["upstream_kg_pkt"], r["electricity_kwh_pkt"])
        except ValueError as exc:
            raise SchemaError(path, line, None, str(exc)) from None
        out[mode] = ModeProfile(mode, vehicle, use, r["servicing_scenario"])
    return out


def load_servicing(path: str | Path) -> dict[str, ServicingScenario]:
    rows = read_table(path, {
        "name": _parse_str,
        "service_vehicle_ef_kg_vkt": _parse_float,
        "km_per_unit_day": _parse_float,
        "unit_daily_mileage": _parse_float,
    }, optional={"unit_daily_mileage": "11"})
    out = {}
    for line, r in enumerate(rows, start=2):
        if r["name"] in out:
            raise SchemaError(path, line, "name", f"duplicate scenario {r['name']!r}")
        try:
            out[r["name"]] = ServicingScenario(
                r["name"], r["service_vehicle_ef_kg_vkt"], r["km_per_unit_day"], r["unit_daily_mileage"])
        except ValueError as exc:
            raise SchemaError(path, line, None, str(exc)) from None
    return out


def load_mixes(path: str | Path) -> dict[str, ElectricityMix]:
    rows = read_table(path, {"code": _parse_str, "intensity_kg_kwh": _parse_float})
    out = {}
    for line, r in enumerate(rows, start=2):
        if r["code"] in out:
            raise SchemaError(path, line, "code", f"duplicate mix {r['code']!r}")
        try:
            out[r["code"]] = ElectricityMix(r["code"], r["intensity_kg_kwh"])
        except ValueError as exc:
            raise SchemaError(path, line, "intensity_kg_kwh", str(exc)) from None
    return out


def load_traffic(path: str | Path) -> list[TrafficRecord]:
    rows = read_table(path, {
        "mode": _parse_str, "infra": _parse_str, "pkt": _parse_float, "vkt": _parse_float,
        "weight": _parse_float, "year": _parse_optional_int,
    }, optional={"weight": "1", "year": ""})
    out = []
    for line, r in enumerate(rows, start=2):
        try:
            out.append(TrafficRecord(r["mode"], r["infra"], r["pkt"], r["vkt"], r["weight"], r["year"]))
        except ValueError as exc:
            raise SchemaError(path, line, None, str(exc)) from None
    return out


def load_assets(path: str | Path) -> dict[str, InfrastructureAsset]:
    rows = read_table(path, {
        "infra_id": _parse_str, "unit": _parse_str, "quantity": _parse_float,
        "ef_per_unit_year": _parse_float, "source": _parse_optional_str,
    }, optional={"source": ""})
    out = {}
    for line, r in enumerate(rows, start=2):
        if r["infra_id"] in out:
            raise SchemaError(path, line, "infra_id", f"duplicate infrastructure {r['infra_id']!r}")
        try:
            out[r["infra_id"]] = InfrastructureAsset(
                r["infra_id"], r["unit"], r["quantity"], r["ef_per_unit_year"], r["source"] or "")
        except ValueError as exc:
            raise SchemaError(path, line, None, str(exc)) from None
    return out


def load_flow_inventory(path: str | Path) -> FlowVector:
    """A unit-process inventory (flow, unit, amount); negative amounts are waste outputs."""
    rows = read_table(path, {"flow": _parse_str, "unit": _parse_str, "amount": _parse_float})
    flows: dict[str, float] = {}
    for line, r in enumerate(rows, start=2):
        if r["flow"] in flows:
            raise SchemaError(path, line, "flow", f"duplicate flow {r['flow']!r}")
        flows[r["flow"]] = r["amount"]
    return FlowVector(flows, signed=True)


_LAYER_KEYS = {"name", "thickness", "density", "lifespan", "binder_fraction", "hot_mixed"}
_STREET_KEYS = {"functional_unit", "width", "transport_distance", "curb_count", "curb_mass", "curb_lifespan",
                "layers"}


def load_streets(path: str | Path) -> dict[str, StreetSpec]:
    data = _read_yaml(path)
    out = {}
    for name, spec in data.items():
        if not isinstance(spec, dict):
            raise SchemaError(path, None, name, "street entry must be a mapping")
        unknown = set(spec) - _STREET_KEYS
        if unknown:
            raise SchemaError(path, None, name, f"unknown keys {sorted(unknown)}")
        try:
            layers = []
            for layer in spec.get("layers", []):
                extra = set(layer) - _LAYER_KEYS
                if extra:
                    raise ValueError(f"unknown layer keys {sorted(extra)}")
                layers.append(Layer(**layer))
            fields = {k: v for k, v in spec.items() if k != "layers"}
            out[name] = StreetSpec(name=name, layers=tuple(layers), **fields)
        except (TypeError, ValueError) as exc:
            raise SchemaError(path, None, name, str(exc)) from None
    return out


def _read_yaml(path: str | Path) -> dict:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise SchemaError(path, None, None, f"cannot read file ({exc.strerror})") from None
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        raise SchemaError(path, None if mark is None else mark.line + 1, None, "invalid YAML") from None
    if not isinstance(data, dict):
        raise SchemaError(path, None, None, "top level must be a mapping")
    return data


# ---------------------------------------------------------------- project

@dataclass(frozen=True)
class ProjectConfig:
    name: str
    root: Path
    paths: Mapping[str, Path]
    year: int
    population: float
    sample_size: int | None
    walk_speed: float
    ffes_mode: str
    scenario: str
    mix: ElectricityMix
    output_dir: Path
    output_format: str

    def __post_init__(self):
        object.__setattr__(self, "paths", MappingProxyType(dict(self.paths)))
        if not self.population > 0:
            raise ConfigurationError(f"population must be > 0, got {self.population}")
        if self.sample_size is not None and self.sample_size <= 0:
            raise ConfigurationError(f"sample_size must be > 0, got {self.sample_size}")
        if self.output_format not in ("csv", "json"):
            raise ConfigurationError(f"output format must be csv or json, got {self.output_format!r}")


_REQUIRED_DATA = ("kinematics", "profiles", "servicing", "traffic", "assets")
_OPTIONAL_DATA = ("survey", "survey_sums", "mixes", "streets")


def data_dir() -> Path:
    """Directory holding the bundled fixture projects, overridable by environment."""
    override = os.environ.get(DATA_DIR_ENV)
    if override:
        return Path(override)
    return Path(str(resources.files("clca") / "data"))


def resolve_project(ref: str | Path) -> Path:
    """A project file path, a directory containing one, or a fixture name."""
    p = Path(ref)
    if p.is_file():
        return p
    if p.is_dir():
        return p / PROJECT_FILE
    candidate = data_dir() / str(ref) / PROJECT_FILE
    if candidate.is_file():
        return candidate
    raise ConfigurationError(f"no project file or fixture named {str(ref)!r} (searched {data_dir()})")


def _config_value(raw: Mapping, key: str, parse: Callable[[Any], Any], path: Path, default: Any = None):
    if key not in raw:
        if default is None:
            raise SchemaError(path, None, key, "required setting is missing")
        return default
    try:
        return parse(raw[key])
    except (TypeError, ValueError) as exc:
        raise SchemaError(path, None, key, str(exc)) from None


def load_config(path: str | Path) -> ProjectConfig:
    path = Path(path)
    raw = _read_yaml(path)
    root = path.parent
    data = raw.get("data") or {}
    if not isinstance(data, dict):
        raise SchemaError(path, None, "data", "must be a mapping of dataset name to file")
    unknown = set(data) - set(_REQUIRED_DATA) - set(_OPTIONAL_DATA)
    if unknown:
        raise SchemaError(path, None, "data", f"unknown datasets {sorted(unknown)}")
    for key in _REQUIRED_DATA:
        if key not in data:
            raise SchemaError(path, None, f"data.{key}", "required dataset is missing")
    if "survey" not in data and "survey_sums" not in data:
        raise SchemaError(path, None, "data.survey", "give either survey or survey_sums")
    paths = {k: (root / str(v)) for k, v in data.items()}
    for key, p in paths.items():
        # the mix table is checked when a command first needs it
        if key != "mixes" and not p.is_file():
            raise SchemaError(path, None, f"data.{key}", f"file not found: {p}")

    analysis = raw.get("analysis") or {}
    mix_raw = analysis.get("mix") or {}
    try:
        mix = ElectricityMix(str(mix_raw["code"]), float(mix_raw["intensity_kg_kwh"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(path, None, "analysis.mix", f"needs code and intensity_kg_kwh ({exc})") from None
    output = raw.get("output") or {}
    return ProjectConfig(
        name=str(raw.get("name", root.name)),
        root=root,
        paths=paths,
        year=_config_value(analysis, "year", int, path),
        population=_config_value(analysis, "population", float, path),
        sample_size=(_config_value(analysis, "sample_size", int, path)
                     if "survey" not in data or "sample_size" in analysis else None),
        walk_speed=_config_value(analysis, "walk_speed_kmh", float, path, DEFAULT_WALK_SPEED),
        ffes_mode=_config_value(analysis, "ffes_mode", str, path, FFES),
        scenario=_config_value(analysis, "scenario", str, path, "baseline"),
        mix=mix,
        output_dir=root / str(output.get("dir", "out")),
        output_format=str(output.get("format", "csv")),
    )


@dataclass(frozen=True)
class Project:
    """Validated, immutable snapshot of every dataset of a project."""

    config: ProjectConfig
    kinematics: Mapping[str, ModeKinematics]
    profiles: Mapping[str, ModeProfile]
    servicing: Mapping[str, ServicingScenario]
    traffic: tuple[TrafficRecord, ...]
    assets: Mapping[str, InfrastructureAsset]
    survey_sums: Mapping[str, float] | None = None
    survey: tuple[SurveyRecord, ...] | None = None
    streets: Mapping[str, StreetSpec] = field(default_factory=dict)

    def __post_init__(self):
        for attr in ("kinematics", "profiles", "servicing", "assets", "streets"):
            object.__setattr__(self, attr, MappingProxyType(dict(getattr(self, attr))))
        object.__setattr__(self, "traffic", tuple(self.traffic))
        if self.survey_sums is not None:
            object.__setattr__(self, "survey_sums", MappingProxyType(dict(self.survey_sums)))
        if self.survey is not None:
            object.__setattr__(self, "survey", tuple(self.survey))

    def mixes(self) -> dict[str, ElectricityMix]:
        path = self.config.paths.get("mixes")
        if path is None:
            raise ConfigurationError(f"project {self.config.name!r} declares no electricity-mix table")
        return load_mixes(path)

    def delta(self, population: float | None = None) -> DeltaPkt:
        cfg = self.config
        population = cfg.population if population is None else population
        if self.survey is not None:
            # without an explicit sample size, n is the number of usable records
            kept, _ = clean(self.survey, cfg.walk_speed)
            return aggregate(kept, cfg.sample_size, population, cfg.walk_speed, self.kinematics,
                             ffes_mode=cfg.ffes_mode)
        return scale_survey_sums(self.survey_sums, cfg.sample_size, population, ffes_mode=cfg.ffes_mode)

    def infra_factors(self) -> dict[str, float]:
        traffic = traffic_for_year(self.traffic, self.config.year)
        return infra_ef_table(self.profiles, self.assets, traffic)

    def factors(self, mix: ElectricityMix | None = None) -> dict[str, EmissionFactor]:
        return factor_table(self.profiles, mix or self.config.mix, self.servicing, self.infra_factors())

    def study(self, population: float | None = None) -> Study:
        cfg = self.config
        return Study(self.delta(population), self.profiles, self.servicing, cfg.mix, self.infra_factors(),
                     ffes_mode=cfg.ffes_mode, name=cfg.scenario)


def _survey_modes(project: Project) -> set[str]:
    if project.survey is not None:
        return {r.original_mode for r in project.survey if r.original_mode}
    return set(project.survey_sums)


def _cross_check(project: Project) -> None:
    cfg = project.config
    ffes = cfg.ffes_mode
    survey_file = cfg.paths.get("survey") or cfg.paths.get("survey_sums")
    for mode in sorted(_survey_modes(project) - {ffes}):
        if mode not in project.kinematics:
            raise LinkError(f"{survey_file}: survey mode {mode!r} has no kinematics")
    shifted = _survey_modes(project) | set(project.kinematics) | {ffes}
    for mode in sorted(shifted):
        if mode not in project.profiles:
            raise LinkError(f"shifted mode {mode!r} has no profile in {cfg.paths['profiles']}")
    for mode, profile in project.profiles.items():
        if profile.servicing_scenario and profile.servicing_scenario not in project.servicing:
            raise LinkError(f"{mode}: servicing scenario {profile.servicing_scenario!r} is not in "
                            f"{cfg.paths['servicing']}")
    years = {r.year for r in project.traffic}
    if cfg.year not in years and None not in years:
        raise LinkError(f"analysis year {cfg.year} is absent from {cfg.paths['traffic']}")
    for record in traffic_for_year(project.traffic, cfg.year):
        if record.infra not in project.assets:
            raise LinkError(f"{cfg.paths['traffic']}: infrastructure {record.infra!r} has no asset row")


def load_project(ref: str | Path) -> Project:
    """Load and cross-check every dataset named by a project file or fixture name."""
    path = resolve_project(ref)
    cfg = load_config(path)
    p = cfg.paths
    project = Project(
        config=cfg,
        kinematics=load_kinematics(p["kinematics"]),
        profiles=load_profiles(p["profiles"]),
        servicing=load_servicing(p["servicing"]),
        traffic=load_traffic(p["traffic"]),
        assets=load_assets(p["assets"]),
        survey_sums=load_survey_sums(p["survey_sums"]) if "survey_sums" in p else None,
        survey=load_survey(p["survey"]) if "survey" in p else None,
        streets=load_streets(p["streets"]) if "streets" in p else {},
    )
    _cross_check(project)
    return project
