"""Annualized material and transport flows of layered street structures.

Flows are expressed per functional unit and per year: one linear metre of a
street (width given) or one square metre. Row names follow a fixed
inventory layout so output can be diffed against reference tables.
"""

from __future__ import annotations

import math
from collections.abc import Mapping
from dataclasses import dataclass, field
from typing import Iterable, Iterator, NamedTuple

from .errors import DomainError, MissingFactorError

BINDER = "Binder (kg)"
GRAVEL = "Gravel (kg)"
CONCRETE = "Concrete block (kg)"
TRANSPORT = "Truck transportation (tkm)"
HMA = "HMA manufacturing (kg)"
FLOW_ROWS = (BINDER, GRAVEL, CONCRETE, TRANSPORT, HMA)

LINEAR_METER = "linear_meter"
SQUARE_METER = "square_meter"


class FlowVector(Mapping):
    """Immutable mapping flow name -> amount per FU.

    Amounts must be non-negative unless ``signed`` is set, which is needed
    for inventories that record waste treatment as negative inputs.
    """

    def __init__(self, flows: Mapping[str, float] | Iterable[tuple[str, float]] = (), *, signed: bool = False):
        data = dict(flows)
        for name, amount in data.items():
            if not math.isfinite(amount) or (not signed and amount < 0):
                raise DomainError(f"flow {name!r} has invalid amount {amount}")
        self._data = data
        self.signed = signed

    def __getitem__(self, key: str) -> float:
        return self._data[key]

    def __iter__(self) -> Iterator[str]:
        return iter(self._data)

    def __len__(self) -> int:
        return len(self._data)

    def __repr__(self) -> str:
        return f"FlowVector({self._data!r})"


@dataclass(frozen=True)
class Layer:
    name: str
    thickness: float  # m
    density: float  # t/m3
    lifespan: float  # years
    binder_fraction: float = 0.0
    hot_mixed: bool = False

    def __post_init__(self):
        if not (self.thickness > 0 and self.density > 0 and self.lifespan > 0):
            raise DomainError(f"layer {self.name}: thickness, density and lifespan must be > 0")
        if not 0 <= self.binder_fraction <= 1:
            raise DomainError(f"layer {self.name}: binder fraction must lie in [0, 1]")


@dataclass(frozen=True)
class StreetSpec:
    name: str
    functional_unit: str = SQUARE_METER
    layers: tuple[Layer, ...] = field(default_factory=tuple)
    width: float | None = None  # m, linear FU only
    curb_mass: float = 0.0  # kg per linear metre per curb
    curb_count: int = 0
    curb_lifespan: float | None = None  # years
    transport_distance: float = 50.0  # km

    def __post_init__(self):
        object.__setattr__(self, "layers", tuple(self.layers))
        if self.functional_unit not in (LINEAR_METER, SQUARE_METER):
            raise DomainError(f"{self.name}: unknown functional unit {self.functional_unit!r}")
        if self.functional_unit == LINEAR_METER and not (self.width and self.width > 0):
            raise DomainError(f"{self.name}: a linear functional unit needs a width > 0")
        if self.curb_count < 0 or self.curb_mass < 0:
            raise DomainError(f"{self.name}: curb count and mass must be >= 0")
        if self.curb_count and self.functional_unit != LINEAR_METER:
            raise DomainError(f"{self.name}: curbs only apply to linear functional units")
        if self.curb_count and not (self.curb_lifespan and self.curb_lifespan > 0):
            raise DomainError(f"{self.name}: curbs need a lifespan > 0")
        if self.transport_distance < 0:
            raise DomainError(f"{self.name}: transport distance must be >= 0")


def layer_annual_mass(layer: Layer, spec: StreetSpec) -> float:
    """kg of layer material per FU and per year."""
    area = spec.width if spec.functional_unit == LINEAR_METER else 1.0
    return area * layer.thickness * layer.density * 1000.0 / layer.lifespan


def annualized_flows(spec: StreetSpec) -> FlowVector:
    binder = gravel = hot_mix = 0.0
    for layer in spec.layers:
        mass = layer_annual_mass(layer, spec)
        binder += mass * layer.binder_fraction
        gravel += mass * (1.0 - layer.binder_fraction)
        if layer.hot_mixed:
            hot_mix += mass
    concrete = spec.curb_count * spec.curb_mass / spec.curb_lifespan if spec.curb_count else 0.0
    transport = (binder + gravel + concrete) / 1000.0 * spec.transport_distance
    return FlowVector({BINDER: binder, GRAVEL: gravel, CONCRETE: concrete, TRANSPORT: transport, HMA: hot_mix})


class InventoryImpact(NamedTuple):
    total: float
    missing: tuple[str, ...]


def inventory_impact(flows: Mapping[str, float], factors: Mapping[str, float], strict: bool = True) -> InventoryImpact:
    """Characterize an inventory: sum of flow amount times per-unit factor.

    In strict mode any non-zero flow without a factor raises
    :class:`MissingFactorError`; otherwise such flows are skipped and listed
    in ``missing``.
    """
    missing = tuple(name for name, amount in flows.items() if amount != 0 and name not in factors)
    if strict and missing:
        raise MissingFactorError(missing)
    total = math.fsum(amount * factors[name] for name, amount in flows.items() if name in factors)
    return InventoryImpact(total, missing)
