from __future__ import annotations

import pytest

from clca.errors import ConfigurationError, DomainError
from clca.mode_factors import (
    NO_SERVICING,
    ElectricityMix,
    ModeProfile,
    ServicingScenario,
    UseProfile,
    VehicleProfile,
    compose,
    factor_for,
    factor_table,
    servicing_ef_per_pkt,
    use_ef_per_pkt,
    vehicle_ef_per_pkt,
)

FR = ElectricityMix("FR", 0.0636)


def test_vehicle_stage():
    assert vehicle_ef_per_pkt(VehicleProfile("bus", 126480, 480000, 17)) == pytest.approx(126480 / (480000 * 17))
    assert vehicle_ef_per_pkt(None) == 0.0


@pytest.mark.parametrize("lifetime, occupancy", [(0, 1), (-5, 1), (100, 0)])
def test_vehicle_profile_domain(lifetime, occupancy):
    with pytest.raises(DomainError):
        VehicleProfile("x", 1.0, lifetime, occupancy)


def test_use_stage_electric_product():
    # streetcar: 5.83E-02 kWh/pkt at 6.36E-02 kg/kWh
    assert use_ef_per_pkt(UseProfile("streetcar", electricity=0.0583), FR) == pytest.approx(3.708e-3, rel=1e-3)


def test_use_stage_sums_fossil_parts():
    assert use_ef_per_pkt(UseProfile("bus", 0.0935, 0.0175), FR) == pytest.approx(0.111)


def test_use_profile_rejects_negative():
    with pytest.raises(DomainError):
        UseProfile("x", electricity=-1)


def test_servicing_formula():
    s = ServicingScenario("LCV", 0.63, 0.9)
    assert servicing_ef_per_pkt(s) == pytest.approx(0.63 * 0.9 / 11)
    assert servicing_ef_per_pkt(None) == 0.0
    assert servicing_ef_per_pkt(NO_SERVICING) == 0.0


def test_servicing_needs_positive_mileage():
    with pytest.raises(DomainError):
        ServicingScenario("x", 1, 1, 0)


def test_compose_total_is_stage_sum():
    f = compose("ffes", 5.56e-2, 1.21e-3, 5.15e-2, 1.13e-3)
    assert f.total == pytest.approx(0.10944)
    assert list(f.stages()) == ["vehicle", "use", "servicing", "infrastructure"]


def test_compose_rejects_negative_stage():
    with pytest.raises(DomainError):
        compose("x", -1, 0, 0, 0)


def test_factor_for_resolves_servicing():
    p = ModeProfile("ffes", VehicleProfile("ffes", 208.5, 3750), UseProfile("ffes", electricity=0.019),
                    "LCV 90 km 100 ES")
    table = {"LCV 90 km 100 ES": ServicingScenario("LCV 90 km 100 ES", 0.63, 0.9)}
    f = factor_for(p, FR, table, 1e-3)
    assert f.vehicle == pytest.approx(0.0556)
    assert f.servicing == pytest.approx(0.0515, rel=1e-3)
    assert f.infrastructure == 1e-3
    assert factor_for(p, FR, table, 0.0, NO_SERVICING).servicing == 0.0
    with pytest.raises(ConfigurationError):
        factor_for(p, FR, {}, 0.0)


def test_with_lifetime():
    p = ModeProfile("ffes", VehicleProfile("ffes", 208.5, 3750), UseProfile("ffes"))
    assert p.with_lifetime(300).vehicle.lifetime_mileage == 300
    with pytest.raises(DomainError):
        p.with_lifetime(0)
    with pytest.raises(ConfigurationError):
        ModeProfile("walk", None, UseProfile("walk")).with_lifetime(10)


def test_factor_table_defaults_infra_to_zero():
    profiles = {"walk": ModeProfile("walk", None, UseProfile("walk"))}
    assert factor_table(profiles, FR, {}, {})["walk"].total == 0.0
