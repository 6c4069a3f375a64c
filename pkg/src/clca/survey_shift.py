"""Survey records to a population-scaled, kilometre-based modal-shift vector.

Each respondent declares the last trip made on a free-floating e-scooter
(FFES), how often they ride, and which mode they would otherwise have used.
The pipeline is

    clean -> ffes_distance / original_distance per record -> aggregate

Distances are km, speeds km/h, declared times minutes (converted to hours
at the function boundary).
"""

from __future__ import annotations

import enum
import math
from collections import Counter
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Iterable, Mapping, NamedTuple, Sequence

from .errors import ConfigurationError, DomainError, EmptyInputError, InputError, RecordError

FFES = "ffes"
DEFAULT_WALK_SPEED = 4.7  # km/h
MAX_FFES_SPEED = 30.0  # km/h; faster declared trips were probably on a personal scooter


class FrequencyClass(enum.Enum):
    """Declared FFES usage frequency, valued by its survey label."""

    MORE_THAN_5_PER_WEEK = "more than 5 times a week"
    FOUR_TO_5_PER_WEEK = "4 to 5 times a week"
    TWO_TO_3_PER_WEEK = "two to three times a week"
    ONCE_A_WEEK = "once a week"
    LESS_THAN_WEEKLY = "less than once a week"
    ONLY_ONCE = "I only used ES once"
    STOPPED = "I stopped using the ES"

    @classmethod
    def parse(cls, label: str | FrequencyClass) -> FrequencyClass:
        if isinstance(label, cls):
            return label
        key = str(label).strip().strip("\"'“”").strip()
        folded = key.casefold()
        for member in cls:
            if folded in (member.value.casefold(), member.name.casefold()):
                return member
        raise InputError(f"unknown frequency class {label!r}")


# annual number of rides attributed to each declaration; None = not considered
_ANNUAL_RIDES = {
    FrequencyClass.MORE_THAN_5_PER_WEEK: 312,
    FrequencyClass.FOUR_TO_5_PER_WEEK: 234,
    FrequencyClass.TWO_TO_3_PER_WEEK: 130,
    FrequencyClass.ONCE_A_WEEK: 52,
    FrequencyClass.LESS_THAN_WEEKLY: 15,
    FrequencyClass.ONLY_ONCE: None,
    FrequencyClass.STOPPED: None,
}


class _Excluded:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "Excluded"

    def __bool__(self) -> bool:
        return False


Excluded = _Excluded()


def weight_of(frequency: FrequencyClass | str) -> int | _Excluded:
    """Annual ride count for a frequency class, or ``Excluded``."""
    rides = _ANNUAL_RIDES[FrequencyClass.parse(frequency)]
    return Excluded if rides is None else rides


@dataclass(frozen=True)
class ModeKinematics:
    mode: str
    speed: float  # km/h
    access_walk: float = 0.0  # metres walked to reach and leave the mode

    def __post_init__(self):
        if not self.speed > 0:
            raise DomainError(f"{self.mode}: speed must be > 0, got {self.speed}")
        if self.access_walk < 0:
            raise DomainError(f"{self.mode}: access_walk must be >= 0, got {self.access_walk}")


@dataclass(frozen=True)
class SurveyRecord:
    id: str
    frequency: FrequencyClass
    original_mode: str | None
    original_duration: float  # min, declared door-to-door time with the original mode
    ffes_access_walk_time: float  # min, walk to reach the scooter
    ffes_trip_distance: float  # km, declared scooter trip length
    ffes_trip_duration: float  # min, declared scooter trip time
    induced: bool = False
    intermodal: bool = False

    def __post_init__(self):
        object.__setattr__(self, "frequency", FrequencyClass.parse(self.frequency))
        for name in ("original_duration", "ffes_access_walk_time", "ffes_trip_distance", "ffes_trip_duration"):
            value = getattr(self, name)
            if not (value >= 0 and math.isfinite(value)):
                raise RecordError(f"{name} must be a finite value >= 0, got {value}", self.id)
        if self.induced == bool(self.original_mode):
            raise RecordError("original_mode must be empty exactly when the trip is induced", self.id)


def ffes_distance(record: SurveyRecord, v_walk: float = DEFAULT_WALK_SPEED) -> float:
    """Distance ridden on the scooter: declared trip length minus the access walk."""
    if not v_walk > 0:
        raise DomainError(f"walking speed must be > 0, got {v_walk}")
    d = record.ffes_trip_distance - v_walk * record.ffes_access_walk_time / 60.0
    if not d > 0:
        raise RecordError(
            f"access walk of {record.ffes_access_walk_time} min does not fit in a "
            f"{record.ffes_trip_distance} km trip",
            record.id,
        )
    return d


class OriginalDistance(NamedTuple):
    km: float
    fallback: bool


def original_distance(
    record: SurveyRecord,
    kin: ModeKinematics | Mapping[str, ModeKinematics],
    v_walk: float = DEFAULT_WALK_SPEED,
) -> OriginalDistance:
    """Distance the respondent would have covered with their original mode.

    The declared door-to-door duration is reduced by the time needed to walk
    the mode's access distance, and the remainder is travelled at the mode's
    commercial speed. When the remainder is not positive the declaration is
    judged too short to be usable and the raw declared FFES trip length is kept
    instead, with ``fallback`` set.
    """
    if record.induced:
        raise RecordError("induced trips have no original mode", record.id)
    if not v_walk > 0:
        raise DomainError(f"walking speed must be > 0, got {v_walk}")
    if isinstance(kin, Mapping):
        try:
            kin = kin[record.original_mode]
        except KeyError:
            raise ConfigurationError(f"no kinematics for mode {record.original_mode!r}") from None
    elif kin.mode != record.original_mode:
        raise ConfigurationError(f"kinematics for {kin.mode!r} given for a {record.original_mode!r} trip")

    riding_hours = record.original_duration / 60.0 - (kin.access_walk / 1000.0) / v_walk
    if riding_hours <= 0:
        return OriginalDistance(record.ffes_trip_distance, True)
    return OriginalDistance(kin.speed * riding_hours, False)


@dataclass(frozen=True)
class CleaningStats:
    input_count: int
    kept: int
    removed: Mapping[str, int]

    @property
    def removed_count(self) -> int:
        return sum(self.removed.values())


REASON_INTERMODAL = "intermodal"
REASON_EXCLUDED_FREQUENCY = "excluded frequency"
REASON_UNDEFINED_SPEED = "undefined speed"
REASON_TOO_FAST = "speed above 30 km/h"
REASON_INCONSISTENT_WALK = "access walk exceeds trip"


def _removal_reason(record: SurveyRecord, v_walk: float) -> str | None:
    if record.intermodal:
        return REASON_INTERMODAL
    if weight_of(record.frequency) is Excluded:
        return REASON_EXCLUDED_FREQUENCY
    if record.ffes_trip_duration <= 0:
        return REASON_UNDEFINED_SPEED
    if 60.0 * record.ffes_trip_distance / record.ffes_trip_duration > MAX_FFES_SPEED:
        return REASON_TOO_FAST
    if record.ffes_trip_distance - v_walk * record.ffes_access_walk_time / 60.0 <= 0:
        return REASON_INCONSISTENT_WALK
    return None


def clean(
    records: Iterable[SurveyRecord], v_walk: float = DEFAULT_WALK_SPEED
) -> tuple[list[SurveyRecord], CleaningStats]:
    """Drop records that cannot enter the aggregation, counting each reason."""
    records = list(records)
    kept: list[SurveyRecord] = []
    removed: Counter[str] = Counter()
    for rec in records:
        reason = _removal_reason(rec, v_walk)
        if reason is None:
            kept.append(rec)
        else:
            removed[reason] += 1
    stats = CleaningStats(len(records), len(kept), MappingProxyType(dict(sorted(removed.items()))))
    return kept, stats


def _frozen(mapping: Mapping[str, float]) -> Mapping[str, float]:
    return MappingProxyType(dict(mapping))


@dataclass(frozen=True)
class DeltaPkt:
    """Signed passenger-km shift per mode over the analysis period.

    ``values`` holds the scaled shift, ``survey_sums`` the weighted sample
    sums it was scaled from. The FFES entry is never negative and every
    substituted mode is never positive.
    """

    values: Mapping[str, float]
    survey_sums: Mapping[str, float]
    n: int
    population: float
    ffes_mode: str = FFES
    trips: Mapping[str, int] = field(default_factory=dict)
    fallback_count: int = 0

    def __post_init__(self):
        object.__setattr__(self, "values", _frozen(self.values))
        object.__setattr__(self, "survey_sums", _frozen(self.survey_sums))
        object.__setattr__(self, "trips", _frozen(self.trips))
        for mode, v in self.values.items():
            if not math.isfinite(v):
                raise DomainError(f"non-finite shift for {mode}")
            if mode == self.ffes_mode and v < 0:
                raise DomainError(f"shift towards {mode} must be >= 0, got {v}")
            if mode != self.ffes_mode and v > 0:
                raise DomainError(f"shift away from {mode} must be <= 0, got {v}")

    def __getitem__(self, mode: str) -> float:
        return self.values[mode]

    def __iter__(self):
        return iter(self.values)

    @property
    def modes(self) -> tuple[str, ...]:
        return tuple(self.values)

    @property
    def ffes(self) -> float:
        return self.values.get(self.ffes_mode, 0.0)

    @property
    def substituted_total(self) -> float:
        return sum(v for m, v in self.values.items() if m != self.ffes_mode)

    @property
    def net_change(self) -> float:
        """Change in total distance travelled across all modes."""
        return sum(self.values.values())

    def weighted_km_shares(self) -> dict[str, float]:
        """Share of the substituted kilometres coming from each mode."""
        total = self.substituted_total
        if total == 0:
            return {m: 0.0 for m in self.values if m != self.ffes_mode}
        return {m: v / total for m, v in self.values.items() if m != self.ffes_mode}

    def trip_shares(self) -> dict[str, float]:
        """Unweighted share of cleaned trips per original mode (induced under the FFES key)."""
        total = sum(self.trips.values())
        return {m: (c / total if total else 0.0) for m, c in self.trips.items()}

    def with_population(self, population: float) -> DeltaPkt:
        return scale_survey_sums(self.survey_sums, self.n, population, ffes_mode=self.ffes_mode,
                                 trips=self.trips, fallback_count=self.fallback_count)


def scale_survey_sums(
    sums: Mapping[str, float],
    n: int,
    population: float,
    *,
    ffes_mode: str = FFES,
    trips: Mapping[str, int] | None = None,
    fallback_count: int = 0,
) -> DeltaPkt:
    """Expand weighted sample sums to the user population: population / n * sum."""
    if n <= 0:
        raise EmptyInputError("sample size must be positive")
    if not population > 0:
        raise DomainError(f"population must be > 0, got {population}")
    factor = population / n
    values = {mode: factor * s for mode, s in sums.items()}
    return DeltaPkt(values, dict(sums), n, population, ffes_mode, dict(trips or {}), fallback_count)


def aggregate(
    records: Sequence[SurveyRecord],
    n: int | None,
    population: float,
    v_walk: float,
    kinematics: Mapping[str, ModeKinematics],
    *,
    ffes_mode: str = FFES,
) -> DeltaPkt:
    """Weighted, population-scaled shift vector from cleaned records.

    Every mode with kinematics gets an entry (zero when unused). Induced
    trips only add to the FFES entry.
    """
    records = list(records)
    if n is None:
        n = len(records)
    if n <= 0 or not records:
        raise EmptyInputError("no survey records to aggregate")

    sums: dict[str, float] = {ffes_mode: 0.0}
    sums.update((m, 0.0) for m in kinematics)
    trips: Counter[str] = Counter()
    fallbacks = 0
    for rec in records:
        wf = weight_of(rec.frequency)
        if wf is Excluded:
            raise RecordError("excluded frequency class reached aggregation; clean first", rec.id)
        sums[ffes_mode] += ffes_distance(rec, v_walk) * wf
        if rec.induced:
            trips[ffes_mode] += 1
            continue
        d = original_distance(rec, kinematics, v_walk)
        fallbacks += d.fallback
        sums[rec.original_mode] -= d.km * wf
        trips[rec.original_mode] += 1
    return scale_survey_sums(sums, n, population, ffes_mode=ffes_mode, trips=trips, fallback_count=fallbacks)
