from __future__ import annotations

import pytest

from clca.errors import DomainError, MissingFactorError
from clca.io import load_flow_inventory
from clca.street_inventory import (
    BINDER,
    CONCRETE,
    GRAVEL,
    HMA,
    LINEAR_METER,
    TRANSPORT,
    FlowVector,
    Layer,
    StreetSpec,
    annualized_flows,
    inventory_impact,
    layer_annual_mass,
)


def test_layer_mass_square_metre():
    spec = StreetSpec("s", layers=[Layer("l", 0.1, 2.0, 10)])
    assert layer_annual_mass(spec.layers[0], spec) == pytest.approx(20.0)


def test_layer_mass_linear_metre_uses_width():
    layer = Layer("l", 0.1, 2.0, 10)
    spec = StreetSpec("s", LINEAR_METER, [layer], width=3)
    assert layer_annual_mass(layer, spec) == pytest.approx(60.0)


def test_flows_split_binder_and_count_transport():
    spec = StreetSpec("s", layers=[Layer("hma", 0.1, 2.0, 10, binder_fraction=0.1, hot_mixed=True)],
                      transport_distance=100)
    f = annualized_flows(spec)
    assert f[BINDER] == pytest.approx(2.0)
    assert f[GRAVEL] == pytest.approx(18.0)
    assert f[HMA] == pytest.approx(20.0)
    assert f[CONCRETE] == 0.0
    assert f[TRANSPORT] == pytest.approx(2.0)


@pytest.mark.parametrize("kwargs", [
    dict(functional_unit="km"),
    dict(functional_unit=LINEAR_METER),
    dict(curb_count=2, curb_mass=10, curb_lifespan=5),
    dict(functional_unit=LINEAR_METER, width=1, curb_count=1, curb_mass=10),
    dict(transport_distance=-1),
])
def test_street_validation(kwargs):
    with pytest.raises(DomainError):
        StreetSpec("s", **kwargs)


def test_layer_validation():
    with pytest.raises(DomainError):
        Layer("l", 0, 1, 1)
    with pytest.raises(DomainError):
        Layer("l", 1, 1, 1, binder_fraction=1.5)


def test_flow_vector_sign():
    with pytest.raises(DomainError):
        FlowVector({"waste": -1.0})
    assert FlowVector({"waste": -1.0}, signed=True)["waste"] == -1.0


def test_impact_strict_and_lenient():
    flows = FlowVector({"a": 2.0, "b": 1.0, "c": 0.0})
    with pytest.raises(MissingFactorError, match="b"):
        inventory_impact(flows, {"a": 3.0})
    total, missing = inventory_impact(flows, {"a": 3.0}, strict=False)
    assert total == 6.0 and missing == ("b",)


# reference annualized inventory per functional unit
CYCLE_LANE = {BINDER: 0.247, GRAVEL: 9.37, CONCRETE: 5.4, TRANSPORT: 0.751, HMA: 4.11}
SIDEWALK = {BINDER: 0.2875, GRAVEL: 6.44, CONCRETE: 0.0, TRANSPORT: 0.336, HMA: 2.875}


@pytest.mark.parametrize("street, expected", [("cycle_lane", CYCLE_LANE), ("sidewalk", SIDEWALK)])
def test_fixture_streets(project, street, expected):
    flows = annualized_flows(project.streets[street])
    for row, value in expected.items():
        assert flows[row] == pytest.approx(value, rel=0.01, abs=1e-12)


def test_fixture_pavement(project):
    flows = annualized_flows(project.streets["pavement"])
    assert flows[BINDER] == pytest.approx(0.705, rel=0.01)
    assert flows[GRAVEL] == pytest.approx(17.7, rel=0.01)
    assert flows[TRANSPORT] == pytest.approx(0.921, rel=0.01)
    # both hot-mixed layers go through the plant; the reference row is lower
    assert flows[HMA] == pytest.approx(14.6, rel=0.01)


def test_unit_process_inventories_load(project):
    root = project.config.root
    hma = load_flow_inventory(root / "hma_plant_inventory.csv")
    assert hma["tap water"] == 700
    scooter = load_flow_inventory(root / "ffes_manufacture_inventory.csv")
    assert scooter["used Li-ion battery"] == -1.159
    assert scooter.signed
