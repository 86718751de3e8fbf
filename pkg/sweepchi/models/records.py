"""In-memory results of the geometric services.

These are plain dataclasses holding numpy data; the pydantic models in
``schemas`` are their serialized counterparts.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from sweepchi.core.errors import NonIntegralResult
from sweepchi.models.schemas import Classification, EventKind


@dataclass(frozen=True)
class TangencyEvent:
    """One contact of a sweeping plane with D (interior) or with its boundary.

    ``index`` is the Morse index sign: +1 for extremes and islands, -1 for
    saddles and bridges.
    """

    kind: EventKind
    level: float
    param: tuple[float, float]
    point: tuple[float, float, float]
    index: int
    # interior
    gauss_curvature: float | None = None
    hessian_det: float | None = None
    # boundary
    curve: int | None = None
    tau: float | None = None
    geodesic_curvature: float | None = None
    section_curvature: float | None = None
    height_acceleration: float | None = None
    normal_alignment: float | None = None

    @property
    def is_interior(self) -> bool:
        return self.kind is EventKind.INTERIOR

    @property
    def classification(self) -> Classification:
        if self.is_interior:
            return Classification.EXTREME if self.index > 0 else Classification.SADDLE
        return Classification.ISLAND if self.index > 0 else Classification.BRIDGE

    @property
    def quantity(self) -> float:
        """K for interior events, k_g - k_g^u for boundary events."""
        if self.is_interior:
            return float(self.gauss_curvature if self.gauss_curvature is not None else self.index)
        return float(self.geodesic_curvature - self.section_curvature)

    @property
    def contribution(self) -> float:
        """Term of the tangency sum: the index, halved on the boundary."""
        return float(self.index) if self.is_interior else 0.5 * self.index

    def sort_key(self) -> tuple:
        """Sweep order: by level, interior events first on ties, then by location."""
        return (self.level, 0 if self.is_interior else 1, self.param, self.curve or 0, self.tau or 0.0)


@dataclass
class GenericityReport:
    """Outcome of the search for a generic sweep direction."""

    direction: np.ndarray
    retries: int = 0
    reasons: list[str] = field(default_factory=list)


@dataclass(frozen=True)
class SweepCensus:
    """Island and bridge tallies of one sweep.

    I2/B2 count interior extremes and saddles, I1/B1 boundary islands and
    bridges.
    """

    i2: int
    b2: int
    i1: int
    b1: int
    events: tuple[TangencyEvent, ...]
    direction: np.ndarray
    report: GenericityReport | None = None

    @property
    def chi(self) -> int:
        twice = 2 * (self.i2 - self.b2) + (self.i1 - self.b1)
        if twice % 2:
            raise NonIntegralResult(twice / 2)
        return twice // 2


@dataclass(frozen=True)
class CellComplexStats:
    vertices: int
    edges: int
    faces: int
    resolution: int

    @property
    def chi(self) -> int:
        return self.vertices - self.edges + self.faces


@dataclass(frozen=True)
class SphericalCoords:
    """Longitude ``theta`` about an axis u and polar distance ``gamma`` from it."""

    theta: float
    gamma: float
