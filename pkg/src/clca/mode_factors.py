"""Per-passenger-km emission factors composed from vehicle, use, servicing
and infrastructure stages.

All impacts are kgCO2eq; per-pkt values are kgCO2eq per passenger-km.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Mapping

from .errors import ConfigurationError, DomainError

STAGES = ("vehicle", "use", "servicing", "infrastructure")
DEFAULT_UNIT_DAILY_MILEAGE = 11.0  # km ridden per shared vehicle per day


def _check_nonneg(owner: str, **values: float) -> None:
    for name, v in values.items():
        if not (math.isfinite(v) and v >= 0):
            raise DomainError(f"{owner}: {name} must be finite and >= 0, got {v}")


@dataclass(frozen=True)
class VehicleProfile:
    """Life cycle of one vehicle outside its use stage.

    ``lifetime_mileage`` is in vehicle-km; ``occupancy`` converts it to pkt.
    """

    mode: str
    ef_one_vehicle: float
    lifetime_mileage: float
    occupancy: float = 1.0

    def __post_init__(self):
        _check_nonneg(self.mode, ef_one_vehicle=self.ef_one_vehicle)
        if not (self.lifetime_mileage > 0 and self.occupancy > 0):
            raise DomainError(f"{self.mode}: lifetime mileage and occupancy must be > 0")


@dataclass(frozen=True)
class UseProfile:
    mode: str
    exhaust: float = 0.0  # kgCO2/pkt, fossil tail-pipe
    upstream_fuel: float = 0.0  # kgCO2eq/pkt, fuel supply chain
    electricity: float = 0.0  # kWh/pkt

    def __post_init__(self):
        _check_nonneg(self.mode, exhaust=self.exhaust, upstream_fuel=self.upstream_fuel,
                      electricity=self.electricity)

    @property
    def electrified(self) -> bool:
        return self.electricity > 0


@dataclass(frozen=True)
class ServicingScenario:
    """Charging / rebalancing logistics attributed to a shared fleet."""

    name: str
    service_vehicle_ef: float  # kgCO2eq per servicing-vehicle-km
    km_per_unit_day: float  # servicing km per shared vehicle per day
    unit_daily_mileage: float = DEFAULT_UNIT_DAILY_MILEAGE

    def __post_init__(self):
        _check_nonneg(self.name, service_vehicle_ef=self.service_vehicle_ef,
                      km_per_unit_day=self.km_per_unit_day)
        if not self.unit_daily_mileage > 0:
            raise DomainError(f"{self.name}: unit daily mileage must be > 0")


NO_SERVICING = ServicingScenario("No servicing", 0.0, 0.0)


@dataclass(frozen=True)
class ElectricityMix:
    code: str
    intensity: float  # kgCO2eq/kWh

    def __post_init__(self):
        _check_nonneg(self.code, intensity=self.intensity)


@dataclass(frozen=True)
class EmissionFactor:
    mode: str
    vehicle: float = 0.0
    use: float = 0.0
    servicing: float = 0.0
    infrastructure: float = 0.0

    @property
    def total(self) -> float:
        return self.vehicle + self.use + self.servicing + self.infrastructure

    def stages(self) -> dict[str, float]:
        return {s: getattr(self, s) for s in STAGES}


def vehicle_ef_per_pkt(p: VehicleProfile | None) -> float:
    if p is None:
        return 0.0
    if p.lifetime_mileage <= 0 or p.occupancy <= 0:
        raise DomainError(f"{p.mode}: lifetime mileage and occupancy must be > 0")
    return p.ef_one_vehicle / (p.lifetime_mileage * p.occupancy)


def use_ef_per_pkt(p: UseProfile, mix: ElectricityMix) -> float:
    return p.exhaust + p.upstream_fuel + p.electricity * mix.intensity


def servicing_ef_per_pkt(s: ServicingScenario | None) -> float:
    if s is None:
        return 0.0
    if s.unit_daily_mileage <= 0:
        raise DomainError(f"{s.name}: unit daily mileage must be > 0")
    return s.service_vehicle_ef * s.km_per_unit_day / s.unit_daily_mileage


def compose(mode: str, vehicle_ef: float, use_ef: float, servicing_ef: float, infra_ef: float) -> EmissionFactor:
    _check_nonneg(mode, vehicle=vehicle_ef, use=use_ef, servicing=servicing_ef, infrastructure=infra_ef)
    return EmissionFactor(mode, vehicle_ef, use_ef, servicing_ef, infra_ef)


@dataclass(frozen=True)
class ModeProfile:
    """Everything needed to compose one mode's factor except infrastructure."""

    mode: str
    vehicle: VehicleProfile | None
    use: UseProfile
    servicing_scenario: str | None = None

    def with_lifetime(self, lifetime_mileage: float) -> ModeProfile:
        if self.vehicle is None:
            raise ConfigurationError(f"{self.mode} has no vehicle profile")
        if not lifetime_mileage > 0:
            raise DomainError(f"lifetime mileage must be > 0, got {lifetime_mileage}")
        return replace(self, vehicle=replace(self.vehicle, lifetime_mileage=lifetime_mileage))


def factor_for(
    profile: ModeProfile,
    mix: ElectricityMix,
    servicing: Mapping[str, ServicingScenario],
    infra_ef: float,
    servicing_override: ServicingScenario | None = None,
) -> EmissionFactor:
    scenario = None
    if profile.servicing_scenario:
        scenario = servicing_override
        if scenario is None:
            try:
                scenario = servicing[profile.servicing_scenario]
            except KeyError:
                raise ConfigurationError(
                    f"{profile.mode}: unknown servicing scenario {profile.servicing_scenario!r}"
                ) from None
    return compose(
        profile.mode,
        vehicle_ef_per_pkt(profile.vehicle),
        use_ef_per_pkt(profile.use, mix),
        servicing_ef_per_pkt(scenario),
        infra_ef,
    )


def factor_table(
    profiles: Mapping[str, ModeProfile],
    mix: ElectricityMix,
    servicing: Mapping[str, ServicingScenario],
    infra_efs: Mapping[str, float],
) -> dict[str, EmissionFactor]:
    """Compose the factor of every profiled mode.

    Modes missing from ``infra_efs`` get a zero infrastructure stage.
    """
    return {
        mode: factor_for(p, mix, servicing, infra_efs.get(mode, 0.0))
        for mode, p in profiles.items()
    }
