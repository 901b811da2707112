"""Quantum transport in a degenerate three-level system driven by three thermal reservoirs."""

from .dynamics import EvolutionTrace, evolve, relaxation_rate
from .errors import (
    AmbiguityError,
    ConfigError,
    DegenerateModelError,
    DomainError,
    FitError,
    IntegrationQualityError,
    PreconditionError,
    QTransportError,
)
from .liouvillian import (
    LiouvillianMatrix,
    apply_theta_em,
    apply_theta_ph,
    apply_theta_sink,
    apply_total,
    build_superoperator,
    total_rate,
    unvectorize,
    vectorize,
)
from .model import (
    BrightGeometry,
    RateSet,
    ReservoirRates,
    ReservoirSpec,
    SystemSpec,
    bright_geometry,
    build_rates,
    planck_occupation,
    with_angle,
)
from .stationary import (
    StationaryResult,
    stationary_alpha0,
    stationary_general,
    stationary_numeric,
    stationarity_residuals,
)
from .transport import (
    FlowResult,
    SweepTable,
    angle_family,
    dark_basis,
    dark_projector,
    flow_alpha0,
    flow_from_state,
    flow_general,
    numerator_angle_law,
    sweep,
)

__version__ = "0.1.0"
