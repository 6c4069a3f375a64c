"""Consequential life cycle assessment of a modal shift towards shared e-scooters."""

from .engine import THREE_STAGE_GROUPS, MarginalReport, assess, stage_shares
from .errors import (
    ClcaError,
    ConfigurationError,
    DegenerateInfrastructureError,
    DomainError,
    EmptyInputError,
    InputError,
    LinkError,
    MissingFactorError,
    NoBreakEvenError,
    RecordError,
    SchemaError,
    UndefinedShareError,
)
from .infra_allocation import (
    InfrastructureAsset,
    TrafficRecord,
    allocation_coefficient,
    allocation_share,
    infra_ef_per_pkt,
    infra_ef_table,
)
from .io import Project, ProjectConfig, load_project
from .mode_factors import (
    NO_SERVICING,
    STAGES,
    ElectricityMix,
    EmissionFactor,
    ModeProfile,
    ServicingScenario,
    UseProfile,
    VehicleProfile,
    compose,
    factor_for,
    servicing_ef_per_pkt,
    use_ef_per_pkt,
    vehicle_ef_per_pkt,
)
from .scenarios import (
    MixModel,
    Scenario,
    Study,
    SweepResult,
    break_even_ffes_ef,
    break_even_mix,
    mix_model,
    sweep_lifetime,
    sweep_mix,
    sweep_servicing,
)
from .street_inventory import FlowVector, Layer, StreetSpec, annualized_flows, inventory_impact
from .survey_shift import (
    DeltaPkt,
    Excluded,
    FrequencyClass,
    ModeKinematics,
    SurveyRecord,
    aggregate,
    clean,
    ffes_distance,
    original_distance,
    scale_survey_sums,
    weight_of,
)

__version__ = "0.1.0"
