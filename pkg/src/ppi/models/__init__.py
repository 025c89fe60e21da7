from .country import CountrySetup
from .network import SpilloverNetwork
from .panel import ClusterAssignment, IndicatorFlags, IndicatorPanel
from .reports import (
    AllocationProfile,
    CalibrationResult,
    FootprintEdge,
    GammaGrid,
    ProfileMode,
    RunManifest,
)
from .simulation import (
    AgentState,
    GovernmentMode,
    MechanismToggles,
    ServantMode,
    SimulationConfig,
    SimulationTrace,
    SpilloverMode,
    SupervisionMode,
)
