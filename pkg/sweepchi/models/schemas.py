from enum import Enum
from typing import Annotated, Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class EventKind(str, Enum):
    """Where the sweeping plane touches the domain."""

    INTERIOR = "interior"
    BOUNDARY = "boundary"


class Classification(str, Enum):
    """Morse type of a tangency."""

    EXTREME = "extreme"
    SADDLE = "saddle"
    ISLAND = "island"
    BRIDGE = "bridge"


class Orientation(str, Enum):
    """Direction in which a boundary curve is traversed."""

    FORWARD = "forward"
    REVERSED = "reversed"


class OutputFormat(str, Enum):
    HUMAN = "human"
    JSON = "json"
    CSV = "csv"


class Method(str, Enum):
    """Counting formula used by the chi command."""

    SWEEP = "sweep"
    PLANAR = "planar"
    PARALLELS = "parallels"
    MERIDIANS = "meridians"


# Scene file schema

Vector3 = tuple[float, float, float]


class PlaneSpec(BaseModel):
    """The plane z = 0 over [-extent, extent]^2."""

    model_config = ConfigDict(extra="forbid")

    kind: Literal["plane"] = "plane"
    extent: float = Field(3.0, gt=0)


class SphereSpec(BaseModel):
    """Unit sphere, in a longitude/latitude or a stereographic chart."""

    model_config = ConfigDict(extra="forbid")

    kind: Literal["sphere"] = "sphere"
    chart: Literal["latlong", "stereographic"] = "stereographic"
    center: Vector3 = (0.0, 0.0, 1.0)
    extent: float = Field(4.0, gt=0)
    margin: float = Field(0.05, gt=0, lt=1.5)

    @field_validator("center")
    @classmethod
    def center_nonzero(cls, v: Vector3) -> Vector3:
        if np.linalg.norm(v) == 0:
            raise ValueError("chart center must be non-zero")
        return v


class EllipsoidSpec(BaseModel):
    """Ellipsoid with semi-axes ``axes`` in a stereographic chart centered at ``center``."""

    model_config = ConfigDict(extra="forbid")

    kind: Literal["ellipsoid"] = "ellipsoid"
    axes: Vector3
    center: Vector3 = (0.0, 0.0, 1.0)
    extent: float = Field(4.0, gt=0)

    @field_validator("axes")
    @classmethod
    def axes_positive(cls, v: Vector3) -> Vector3:
        if min(v) <= 0:
            raise ValueError("semi-axes must be positive")
        return v


class TorusSpec(BaseModel):
    """Torus of revolution about the z axis."""

    model_config = ConfigDict(extra="forbid")

    kind: Literal["torus"] = "torus"
    major_radius: float = Field(2.0, gt=0)
    minor_radius: float = Field(1.0, gt=0)

    @model_validator(mode="after")
    def not_self_intersecting(self):
        if self.minor_radius >= self.major_radius:
            raise ValueError("minor_radius must be smaller than major_radius")
        return self


class GraphSpec(BaseModel):
    """Graph of the polynomial sum coefficients[i][j] x^i y^j."""

    model_config = ConfigDict(extra="forbid")

    kind: Literal["graph"] = "graph"
    coefficients: list[list[float]] = Field(min_length=1)
    extent: float = Field(2.0, gt=0)


SurfaceSpec = Annotated[
    PlaneSpec | SphereSpec | EllipsoidSpec | TorusSpec | GraphSpec,
    Field(discriminator="kind"),
]


class FourierSpec(BaseModel):
    """Truncated Fourier series mean + sum_k cos[k-1] cos(k tau) + sin[k-1] sin(k tau)."""

    model_config = ConfigDict(extra="forbid")

    mean: float = 0.0
    cos: list[float] = Field(default_factory=list)
    sin: list[float] = Field(default_factory=list)


class BoundarySpec(BaseModel):
    """A closed boundary curve in parameter space."""

    model_config = ConfigDict(extra="forbid")

    s: FourierSpec
    t: FourierSpec
    winding: tuple[int, int] = (0, 0)
    orientation: Orientation = Orientation.FORWARD


class SceneFile(BaseModel):
    """On-disk scene description, see docs/sweepchi/scene-format.md."""

    model_config = ConfigDict(extra="forbid")

    name: str = Field(min_length=1)
    description: str = ""
    surface: SurfaceSpec
    boundaries: list[BoundarySpec] = Field(default_factory=list)
    seed: tuple[float, float]
    reference_chi: int | None = None


# Run configuration (CLI flags and API request bodies)


class RunConfig(BaseModel):
    """Parameters of a chi, census or validate run."""

    scene: str = Field(min_length=1)
    direction: list[float] | Literal["random"] = "random"
    seed: int = 0
    format: OutputFormat = OutputFormat.HUMAN
    method: Method = Method.SWEEP
    grid: int | None = Field(None, ge=16)
    samples: int | None = Field(None, ge=64)
    tol_k: float | None = Field(None, gt=0)
    tol_kg: float | None = Field(None, gt=0)
    retries: int | None = Field(None, ge=0)

    @field_validator("direction")
    @classmethod
    def direction_nonzero(cls, v):
        if v == "random":
            return v
        if len(v) not in (2, 3):
            raise ValueError("direction must have 2 or 3 components")
        if not np.all(np.isfinite(v)) or np.linalg.norm(v) == 0:
            raise ValueError("direction must be non-zero")
        return v

    def overrides(self) -> dict:
        """Settings fields replaced by this run."""
        pairs = {
            "grid": self.grid,
            "samples": self.samples,
            "tol_k": self.tol_k,
            "tol_kg": self.tol_kg,
            "max_retries": self.retries,
        }
        return {key: value for key, value in pairs.items() if value is not None}


# Reports


class EventRecord(BaseModel):
    """One tangency of the sweeping plane."""

    kind: EventKind
    classification: Classification
    level: float
    s: float
    t: float
    curve: int | None = None
    tau: float | None = None
    location: list[float]
    quantity: float
    index: int
    running_chi: float | None = None


class GenericityRecord(BaseModel):
    direction: list[float]
    retries: int
    reasons: list[str]


class ChiReport(BaseModel):
    """Result of the chi command."""

    scene: str
    method: Method
    chi: int
    reference_chi: int | None = None
    direction: list[float]
    events: list[EventRecord]
    genericity: GenericityRecord


class CensusReport(BaseModel):
    """Island/bridge tallies along the sweep, ordered by level."""

    scene: str
    direction: list[float]
    i2: int
    b2: int
    i1: int
    b1: int
    chi: int
    events: list[EventRecord]
    genericity: GenericityRecord


class DirectionResult(BaseModel):
    """Per-direction row of the validation agreement matrix."""

    index: int
    requested: list[float]
    accepted: list[float] | None = None
    retries: int = 0
    sweep: int | None = None
    census: int | None = None
    special: dict[str, int | None] = Field(default_factory=dict)
    error: str | None = None
    agrees: bool = False


class ValidationReport(BaseModel):
    """Sweep, census and oracle agreement over many directions."""

    scene: str
    reference_chi: int | None = None
    cell_complex: int
    cell_resolution: int
    gauss_bonnet: float
    gauss_bonnet_residual: float
    directions: list[DirectionResult]
    max_retries_used: int
    mean_retries: float
    all_agree: bool


class CatalogEntry(BaseModel):
    name: str
    surface: str
    reference_chi: int | None = None
    description: str = ""
