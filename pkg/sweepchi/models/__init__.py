from .records import (
    CellComplexStats,
    GenericityReport,
    SphericalCoords,
    SweepCensus,
    TangencyEvent,
)
from .schemas import (
    CatalogEntry,
    CensusReport,
    ChiReport,
    Classification,
    EventKind,
    EventRecord,
    Method,
    OutputFormat,
    RunConfig,
    SceneFile,
    ValidationReport,
)

__all__ = [
    "CatalogEntry",
    "CellComplexStats",
    "CensusReport",
    "ChiReport",
    "Classification",
    "EventKind",
    "EventRecord",
    "GenericityReport",
    "Method",
    "OutputFormat",
    "RunConfig",
    "SceneFile",
    "SphericalCoords",
    "SweepCensus",
    "TangencyEvent",
    "ValidationReport",
]
