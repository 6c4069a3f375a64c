from __future__ import annotations

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from clca.errors import DegenerateInfrastructureError, DomainError
from clca.infra_allocation import (
    InfrastructureAsset,
    TrafficRecord,
    allocation_coefficient,
    allocation_share,
    infra_ef_per_pkt,
    infra_ef_table,
    traffic_for_year,
)


def test_share_example():
    recs = [TrafficRecord("car", "road", 3, 3), TrafficRecord("bus", "road", 20, 1, weight=2)]
    assert allocation_share(recs) == pytest.approx({"car": 0.6, "bus": 0.4})


def test_share_rejects_mixed_infrastructures():
    with pytest.raises(ValueError):
        allocation_share([TrafficRecord("a", "x", 1, 1), TrafficRecord("b", "y", 1, 1)])


def test_zero_traffic_is_degenerate():
    with pytest.raises(DegenerateInfrastructureError):
        allocation_share([TrafficRecord("a", "x", 0, 0)])


def test_negative_traffic_rejected():
    with pytest.raises(DomainError):
        TrafficRecord("a", "x", -1, 1)


def test_asset_validation():
    with pytest.raises(DomainError):
        InfrastructureAsset("x", "m", 0, 1)
    with pytest.raises(DomainError):
        InfrastructureAsset("x", "m", 1, -1)


def test_grouped_label_gives_members_the_same_factor():
    traffic = [TrafficRecord("car+taxi", "road", 10, 5), TrafficRecord("bus", "road", 40, 5)]
    assets = {"road": InfrastructureAsset("road", "m2", 10, 2.0)}
    table = infra_ef_table(["car", "taxi", "bus", "walk"], assets, traffic)
    assert table["car"] == table["taxi"] == pytest.approx(0.5 * 20 / 10)
    assert table["bus"] == pytest.approx(0.5 * 20 / 40)
    assert table["walk"] == 0.0


def test_ambiguous_label():
    traffic = [TrafficRecord("car+taxi", "road", 1, 1), TrafficRecord("car", "road", 1, 1)]
    with pytest.raises(ValueError):
        allocation_coefficient("car", "road", traffic)


def test_mixed_years_must_be_filtered():
    traffic = [TrafficRecord("a", "x", 1, 1, year=2017), TrafficRecord("a", "x", 2, 2, year=2018)]
    with pytest.raises(ValueError):
        infra_ef_table(["a"], {"x": InfrastructureAsset("x", "m", 1, 1)}, traffic)
    assert len(traffic_for_year(traffic, 2018)) == 1


def test_missing_asset():
    with pytest.raises(DomainError):
        infra_ef_per_pkt("a", {}, [TrafficRecord("a", "x", 1, 1)])


def test_zero_pkt_with_share():
    with pytest.raises(DomainError):
        infra_ef_per_pkt("a", {"x": InfrastructureAsset("x", "m", 1, 1)}, [TrafficRecord("a", "x", 0, 1)])


# reference 2018 coefficients, per pkt except the road rows which are per vkt
@pytest.mark.parametrize("mode, infra, basis, expected", [
    ("rer", "rer_track", "pkt", 1.83e-10),
    ("metro", "metro_track", "pkt", 1.26e-10),
    ("streetcar", "streetcar_track", "pkt", 3.07e-9),
    ("bus", "bus_lane", "pkt", 1.24e-9),
    ("bus", "roadway", "vkt", 4.39e-10),
    ("taxi", "roadway", "vkt", 4.39e-10),
    ("car", "roadway", "vkt", 4.39e-10),
    ("truck", "roadway", "vkt", 4.39e-10),
    ("personal_motor_scooter", "roadway", "vkt", 4.39e-10),
    ("ffes", "cycle_lane", "pkt", 1.73e-9),
    ("walk", "sidewalk", "pkt", 1.45e-9),
])
def test_allocation_coefficients_2018(project, mode, infra, basis, expected):
    traffic = traffic_for_year(project.traffic, 2018)
    assert allocation_coefficient(mode, infra, traffic, basis) == pytest.approx(expected, rel=0.01)


@pytest.mark.parametrize("mode, infra, basis, expected", [
    ("metro", "metro_track", "pkt", 1.23e-10),
    ("rer", "rer_track", "pkt", 1.81e-10),
    ("bus", "bus_lane", "pkt", 1.21e-9),
    ("car", "roadway", "vkt", 4.33e-10),
    ("walk", "sidewalk", "pkt", 1.33e-9),
    ("shared_bicycle", "cycle_lane", "pkt", 2.68e-9),
])
def test_allocation_coefficients_2017(project, mode, infra, basis, expected):
    traffic = traffic_for_year(project.traffic, 2017)
    assert allocation_coefficient(mode, infra, traffic, basis) == pytest.approx(expected, rel=0.015)


@st.composite
def networks(draw):
    k = draw(st.integers(1, 8))
    vkts = draw(st.lists(st.floats(0, 1e10), min_size=k, max_size=k))
    weights = draw(st.lists(st.floats(0.01, 100), min_size=k, max_size=k))
    if sum(w * v for w, v in zip(weights, vkts)) <= 0:
        vkts[0] = 1.0
    return [TrafficRecord(f"m{i}", "net", v, v, w) for i, (v, w) in enumerate(zip(vkts, weights))]


@settings(max_examples=1000, deadline=None)
@given(networks(), st.floats(1e-3, 1e3))
def test_shares_sum_to_one_and_ignore_weight_scale(records, scale):
    shares = allocation_share(records)
    assert math.isclose(math.fsum(shares.values()), 1.0, rel_tol=1e-12)
    assert all(0 <= s <= 1 for s in shares.values())
    scaled = allocation_share([TrafficRecord(r.mode, r.infra, r.pkt, r.vkt, r.weight * scale) for r in records])
    for m, s in shares.items():
        assert math.isclose(scaled[m], s, rel_tol=1e-9, abs_tol=1e-15)
