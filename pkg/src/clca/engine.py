"""Marginal territorial impact of a modal shift."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Mapping

from .errors import ConfigurationError, UndefinedShareError
from .mode_factors import STAGES, EmissionFactor
from .survey_shift import DeltaPkt

# three-way breakdown with servicing counted as part of operating the fleet
THREE_STAGE_GROUPS = {"vehicle": ("vehicle",), "use": ("use", "servicing"), "infrastructure": ("infrastructure",)}


@dataclass(frozen=True)
class MarginalReport:
    """Signed per-mode, per-stage marginal impacts (kgCO2eq over the period)."""

    contributions: Mapping[str, Mapping[str, float]]
    population: float | None = None
    period: str = "1 year"
    scenario: str = "baseline"
    metadata: Mapping[str, object] = field(default_factory=dict)

    def __post_init__(self):
        frozen = {m: MappingProxyType(dict(c)) for m, c in self.contributions.items()}
        object.__setattr__(self, "contributions", MappingProxyType(frozen))
        object.__setattr__(self, "metadata", MappingProxyType(dict(self.metadata)))

    @property
    def per_mode(self) -> dict[str, float]:
        return {m: sum(c[s] for s in STAGES) for m, c in self.contributions.items()}

    @property
    def total(self) -> float:
        return math.fsum(self.per_mode.values())

    def stage_totals(self) -> dict[str, float]:
        return {s: math.fsum(c[s] for c in self.contributions.values()) for s in STAGES}


def assess(
    delta: DeltaPkt | Mapping[str, float],
    factors: Mapping[str, EmissionFactor],
    *,
    factors_after: Mapping[str, EmissionFactor] | None = None,
    baseline_pkt: Mapping[str, float] | None = None,
    scenario: str = "baseline",
    period: str = "1 year",
) -> MarginalReport:
    """ei_i = EF_i * dPKT_i per mode and stage.

    With ``factors_after`` the factors differ between the reference and the
    disrupted situation and ``baseline_pkt`` is required:
    ei_i = EF'_i * (PKT_i + dPKT_i) - EF_i * PKT_i.
    """
    values = delta.values if isinstance(delta, DeltaPkt) else delta
    population = delta.population if isinstance(delta, DeltaPkt) else None
    missing = [m for m in values if m not in factors]
    if missing:
        raise ConfigurationError("no emission factor for shifted mode(s): " + ", ".join(missing))
    if factors_after is not None:
        if baseline_pkt is None:
            raise ConfigurationError("distinct before/after factors need the reference pkt per mode")
        missing = [m for m in values if m not in factors_after or m not in baseline_pkt]
        if missing:
            raise ConfigurationError("incomplete before/after data for: " + ", ".join(missing))

    contributions = {}
    for mode, d in values.items():
        before = factors[mode].stages()
        if factors_after is None:
            contributions[mode] = {s: before[s] * d for s in STAGES}
        else:
            after = factors_after[mode].stages()
            pkt = baseline_pkt[mode]
            contributions[mode] = {s: after[s] * (pkt + d) - before[s] * pkt for s in STAGES}
    return MarginalReport(contributions, population, period, scenario)


def stage_shares(report: MarginalReport, grouping: Mapping[str, tuple[str, ...]] | None = None) -> dict[str, float]:
    """Fraction of the absolute marginal emissions attributable to each stage.

    Every mode-stage contribution counts by its magnitude, so gains and
    losses both add to the denominator. ``grouping`` merges stages, e.g.
    :data:`THREE_STAGE_GROUPS`.
    """
    groups = grouping or {s: (s,) for s in STAGES}
    magnitude = {
        g: math.fsum(abs(c[s]) for c in report.contributions.values() for s in stages)
        for g, stages in groups.items()
    }
    denom = math.fsum(magnitude.values())
    if denom == 0:
        raise UndefinedShareError("stage shares are undefined for an all-zero report")
    return {g: v / denom for g, v in magnitude.items()}
