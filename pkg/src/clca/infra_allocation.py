"""Allocation of infrastructure network impacts to the modes that use them.

A network of type j has an annual impact q_j * EF_1u,j. Mode i receives the
share

    a_ij = b_ij * VKT_ij / sum_k b_kj * VKT_kj

of it, spread over its passenger-km on that network. Several modes can be
grouped on one traffic record (``"car+taxi"``) when only their combined
traffic is known; each member then gets the group's per-pkt factor.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .errors import DegenerateInfrastructureError, DomainError

GROUP_SEPARATOR = "+"


@dataclass(frozen=True)
class InfrastructureAsset:
    infra_id: str
    unit: str  # "m" (linear metre) or "m2"
    quantity: float
    ef_per_unit_year: float  # kgCO2eq per unit per year
    source: str = ""

    def __post_init__(self):
        if not self.quantity > 0:
            raise DomainError(f"{self.infra_id}: quantity must be > 0")
        if not (self.ef_per_unit_year >= 0 and math.isfinite(self.ef_per_unit_year)):
            raise DomainError(f"{self.infra_id}: ef_per_unit_year must be >= 0")


@dataclass(frozen=True)
class TrafficRecord:
    mode: str
    infra: str
    pkt: float
    vkt: float
    weight: float = 1.0
    year: int | None = None

    def __post_init__(self):
        for name in ("pkt", "vkt", "weight"):
            v = getattr(self, name)
            if not (v >= 0 and math.isfinite(v)):
                raise DomainError(f"{self.mode} on {self.infra}: {name} must be finite and >= 0")

    @property
    def members(self) -> tuple[str, ...]:
        return tuple(m.strip() for m in self.mode.split(GROUP_SEPARATOR))

    @property
    def load(self) -> float:
        return self.weight * self.vkt


def network_annual_impact(asset: InfrastructureAsset) -> float:
    return asset.quantity * asset.ef_per_unit_year


def allocation_share(records: Iterable[TrafficRecord]) -> dict[str, float]:
    """VKT-weighted shares of one infrastructure, keyed by traffic record mode.

    Records with the same mode label are pooled.
    """
    loads: dict[str, float] = defaultdict(float)
    infras = set()
    for r in records:
        loads[r.mode] += r.load
        infras.add(r.infra)
    if len(infras) > 1:
        raise ValueError(f"records span several infrastructures: {sorted(infras)}")
    total = math.fsum(loads.values())
    if not total > 0:
        raise DegenerateInfrastructureError(f"no weighted traffic on {next(iter(infras), '?')}")
    return {m: load / total for m, load in loads.items()}


def traffic_for_year(traffic: Iterable[TrafficRecord], year: int) -> list[TrafficRecord]:
    return [r for r in traffic if r.year is None or r.year == year]


def _by_infra(traffic: Iterable[TrafficRecord]) -> dict[str, list[TrafficRecord]]:
    out: dict[str, list[TrafficRecord]] = defaultdict(list)
    years = set()
    for r in traffic:
        out[r.infra].append(r)
        if r.year is not None:
            years.add(r.year)
    if len(years) > 1:
        raise ValueError(f"traffic table mixes years {sorted(years)}; filter with traffic_for_year")
    return out


def _label_for(mode: str, records: Sequence[TrafficRecord]) -> str | None:
    labels = {r.mode for r in records if mode in r.members}
    if len(labels) > 1:
        raise ValueError(f"{mode} appears under several traffic labels on one network: {sorted(labels)}")
    return labels.pop() if labels else None


def allocation_coefficient(mode: str, infra: str, traffic: Iterable[TrafficRecord], basis: str = "pkt") -> float:
    """a_ij divided by the mode's own traffic on j (per pkt or per vkt).

    Multiplying by the network's annual impact gives the mode's per-pkt
    (or per-vkt) infrastructure factor on that network.
    """
    on_infra = _by_infra(traffic).get(infra, [])
    label = _label_for(mode, on_infra)
    if label is None:
        raise KeyError(f"{mode} has no traffic on {infra}")
    share = allocation_share(on_infra)[label]
    own = math.fsum(getattr(r, basis) for r in on_infra if r.mode == label)
    if not own > 0:
        raise DomainError(f"{mode} has zero {basis} on {infra}")
    return share / own


def infra_ef_per_pkt(
    mode: str,
    assets: Mapping[str, InfrastructureAsset],
    traffic: Iterable[TrafficRecord],
) -> float:
    """Infrastructure stage of a mode's factor, kgCO2eq/pkt.

    Sums share * network impact / PKT over every network the mode uses.
    A mode without any traffic record has no infrastructure stage.
    """
    grouped = _by_infra(traffic)
    total = 0.0
    for infra, records in grouped.items():
        label = _label_for(mode, records)
        if label is None:
            continue
        share = allocation_share(records).get(label, 0.0)
        if share == 0.0:
            continue
        pkt = math.fsum(r.pkt for r in records if r.mode == label)
        if not pkt > 0:
            raise DomainError(f"{mode} uses {infra} but has zero pkt on it")
        try:
            asset = assets[infra]
        except KeyError:
            raise DomainError(f"no asset data for infrastructure {infra!r}") from None
        total += share * network_annual_impact(asset) / pkt
    return total


def infra_ef_table(
    modes: Iterable[str],
    assets: Mapping[str, InfrastructureAsset],
    traffic: Iterable[TrafficRecord],
) -> dict[str, float]:
    traffic = list(traffic)
    return {m: infra_ef_per_pkt(m, assets, traffic) for m in modes}
