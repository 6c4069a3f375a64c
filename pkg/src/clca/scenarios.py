"""One-at-a-time sensitivity sweeps and break-even solvers.

A :class:`Study` bundles the baseline shift vector and everything needed to
recompose emission factors. Scenarios override one or more baseline inputs
and re-run the assessment; nothing else changes.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from types import MappingProxyType
from typing import Callable, Iterable, Mapping, Sequence, TypeVar

from .engine import MarginalReport, assess
from .errors import ConfigurationError, DomainError, NoBreakEvenError
from .mode_factors import (
    ElectricityMix,
    EmissionFactor,
    ModeProfile,
    ServicingScenario,
    factor_for,
)
from .survey_shift import FFES, DeltaPkt

T = TypeVar("T")

LIFETIME_RANGE = (300.0, 15000.0)


@dataclass(frozen=True)
class Scenario:
    name: str
    lifetime_mileage: float | None = None  # FFES vehicle-km
    servicing: ServicingScenario | None = None  # FFES servicing
    mix: ElectricityMix | None = None  # every electrified use stage
    population: float | None = None

    def __post_init__(self):
        if all(v is None for v in (self.lifetime_mileage, self.servicing, self.mix, self.population)):
            raise ValueError(f"scenario {self.name!r} overrides nothing")
        if self.lifetime_mileage is not None and not self.lifetime_mileage > 0:
            raise DomainError(f"lifetime mileage must be > 0, got {self.lifetime_mileage}")
        if self.population is not None and not self.population > 0:
            raise DomainError(f"population must be > 0, got {self.population}")


@dataclass(frozen=True)
class Study:
    delta: DeltaPkt
    profiles: Mapping[str, ModeProfile]
    servicing: Mapping[str, ServicingScenario]
    mix: ElectricityMix
    infra: Mapping[str, float]
    ffes_mode: str = FFES
    name: str = "baseline"

    def __post_init__(self):
        for attr in ("profiles", "servicing", "infra"):
            object.__setattr__(self, attr, MappingProxyType(dict(getattr(self, attr))))

    def _profile(self, mode: str) -> ModeProfile:
        try:
            return self.profiles[mode]
        except KeyError:
            raise ConfigurationError(f"no mode profile for shifted mode {mode!r}") from None

    def factors(self, scenario: Scenario | None = None) -> dict[str, EmissionFactor]:
        """Factors of every shifted mode under ``scenario`` (baseline if None)."""
        mix = self.mix if scenario is None or scenario.mix is None else scenario.mix
        out = {}
        for mode in self.delta.modes:
            profile = self._profile(mode)
            override = None
            if scenario is not None and mode == self.ffes_mode:
                if scenario.lifetime_mileage is not None:
                    profile = profile.with_lifetime(scenario.lifetime_mileage)
                override = scenario.servicing
            out[mode] = factor_for(profile, mix, self.servicing, self.infra.get(mode, 0.0), override)
        return out

    def assess(self, scenario: Scenario | None = None) -> MarginalReport:
        delta = self.delta
        if scenario is not None and scenario.population is not None:
            delta = delta.with_population(scenario.population)
        name = self.name if scenario is None else scenario.name
        return assess(delta, self.factors(scenario), scenario=name)

    def total(self, scenario: Scenario | None = None) -> float:
        return self.assess(scenario).total


@dataclass(frozen=True)
class SweepResult:
    parameter: str
    values: tuple
    totals: tuple[float, ...]
    fit: Mapping[str, object] = field(default_factory=dict)

    def __post_init__(self):
        if len(self.values) != len(self.totals):
            raise ValueError("sweep values and totals differ in length")
        if not all(math.isfinite(t) for t in self.totals):
            raise DomainError("sweep produced a non-finite total")
        object.__setattr__(self, "fit", MappingProxyType(dict(self.fit)))

    def rows(self) -> list[tuple[object, float]]:
        return list(zip(self.values, self.totals))


def _evaluate(fn: Callable[[T], float], items: Sequence[T], max_workers: int | None) -> tuple[float, ...]:
    if max_workers and max_workers > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            return tuple(pool.map(fn, items))
    return tuple(fn(x) for x in items)


def default_lifetime_grid(points: int = 25, lo: float = LIFETIME_RANGE[0], hi: float = LIFETIME_RANGE[1]) -> list[float]:
    """Log-spaced lifetimes from ``lo`` to ``hi`` inclusive."""
    if points < 2:
        return [lo]
    ratio = math.log(hi / lo)
    return [lo * math.exp(ratio * k / (points - 1)) for k in range(points)]


def sweep_lifetime(study: Study, grid: Iterable[float] | None = None, max_workers: int | None = None) -> SweepResult:
    """Total marginal impact against FFES lifetime mileage.

    Manufacturing impact stays fixed, so the total is exactly
    c0 + c1 / L with c1 = EF_1veh / occupancy * dPKT_FFES.
    """
    grid = tuple(float(x) for x in (default_lifetime_grid() if grid is None else grid))
    bad = [x for x in grid if not x > 0]
    if bad:
        raise DomainError(f"lifetime mileage must be > 0, got {bad[0]}")
    vehicle = study._profile(study.ffes_mode).vehicle
    if vehicle is None:
        raise ConfigurationError(f"{study.ffes_mode} has no vehicle profile")

    totals = _evaluate(lambda L: study.total(Scenario(f"lifetime {L:g} km", lifetime_mileage=L)), grid, max_workers)
    c1 = vehicle.ef_one_vehicle / vehicle.occupancy * study.delta.ffes
    # c0 is the total at infinite lifetime: baseline minus the FFES vehicle stage
    report = study.assess()
    c0 = report.total - report.contributions[study.ffes_mode]["vehicle"]
    fit = {"model": "c0 + c1 / L", "c0": c0, "c1": c1}
    return SweepResult("lifetime_km", grid, totals, fit)


def sweep_servicing(
    study: Study, scenarios: Iterable[ServicingScenario], max_workers: int | None = None
) -> SweepResult:
    scenarios = tuple(scenarios)
    totals = _evaluate(lambda s: study.total(Scenario(s.name, servicing=s)), scenarios, max_workers)
    return SweepResult("servicing", tuple(s.name for s in scenarios), totals, {"model": "per-scenario"})


@dataclass(frozen=True)
class MixModel:
    """total = alpha + beta * intensity."""

    alpha: float
    beta: float

    def predict(self, intensity: float) -> float:
        return self.alpha + self.beta * intensity

    def break_even(self) -> float:
        if self.beta == 0:
            raise NoBreakEvenError("total does not depend on the electricity mix")
        if self.beta > 0:
            raise NoBreakEvenError(
                "no positive-intensity break-even from above: a dirtier mix only raises the total"
            )
        return -self.alpha / self.beta


def mix_model(study: Study) -> MixModel:
    """Affine dependence of the total on the use-stage electricity intensity.

    The slope is the net change in electricity consumed, sum of kWh/pkt times
    dPKT over all shifted modes.
    """
    alpha = study.total(Scenario("mix 0", mix=ElectricityMix("zero", 0.0)))
    beta = math.fsum(study._profile(m).use.electricity * d for m, d in study.delta.values.items())
    return MixModel(alpha, beta)


def sweep_mix(study: Study, mixes: Iterable[ElectricityMix], max_workers: int | None = None) -> SweepResult:
    mixes = tuple(mixes)
    totals = _evaluate(lambda mx: study.total(Scenario(mx.code, mix=mx)), mixes, max_workers)
    model = mix_model(study)
    fit = {"model": "alpha + beta * intensity", "alpha": model.alpha, "beta": model.beta,
           "intensities": [mx.intensity for mx in mixes]}
    return SweepResult("mix", tuple(mx.code for mx in mixes), totals, fit)


def break_even_mix(study: Study) -> float:
    """Electricity intensity (kgCO2eq/kWh) at which the total marginal impact is zero."""
    return mix_model(study).break_even()


def break_even_ffes_ef(study: Study) -> float:
    """FFES emission factor (kgCO2eq/pkt) that makes the total marginal impact zero."""
    d_ffes = study.delta.ffes
    if not d_ffes > 0:
        raise DomainError("no kilometres shifted to the FFES")
    factors = study.factors()
    avoided = math.fsum(-factors[m].total * d for m, d in study.delta.values.items() if m != study.ffes_mode)
    return avoided / d_ffes


def with_ffes_factor(study: Study, total_ef: float) -> MarginalReport:
    """Assess with the FFES factor replaced by a single lumped value."""
    factors = study.factors()
    factors[study.ffes_mode] = replace(factors[study.ffes_mode], vehicle=total_ef, use=0.0, servicing=0.0,
                                       infrastructure=0.0)
    return assess(study.delta, factors, scenario=f"ffes ef {total_ef:g}")
