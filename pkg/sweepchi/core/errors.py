"""Exception hierarchy shared by every sweepchi module."""

from __future__ import annotations

from typing import TYPE_CHECKING

if TYPE_CHECKING:
    from sweepchi.models.records import GenericityReport


class SweepChiError(Exception):
    """Base class for all sweepchi errors."""


# Geometry


class GeometryError(SweepChiError):
    """A differential-geometric quantity is undefined at the requested point."""


class DegenerateChart(GeometryError):
    """The chart is not regular: |P_s x P_t| vanishes."""


class SingularCurvePoint(GeometryError):
    """A boundary curve has zero velocity."""


class ProjectionUndefined(GeometryError):
    """The direction is normal to the surface, so it has no tangential part."""


# Genericity: the direction hits the null set of bad directions


class GenericityError(SweepChiError):
    """The sweep direction is not generic; perturbing it may help."""


class DegenerateTangency(GenericityError):
    """An interior critical point of the height function has K close to 0."""


class DegenerateBoundaryTangency(GenericityError):
    """A boundary tangency has k_g close to k_g^u, or the height is flat along a curve."""


class InteriorCriticalOnBoundary(GenericityError):
    """The height function has a critical point of h_u|_D on the boundary."""


class NonTransverseSection(GenericityError, GeometryError):
    """The plane section is not transverse to the surface (<u, n> vanishes)."""


class PoleOnBoundary(GenericityError):
    """u or -u lies on the boundary, or a tangency sits at a pole of u."""


class DegenerateMeridianTangency(GenericityError):
    """A meridian tangency has vanishing geodesic curvature."""


class GenericityExhausted(SweepChiError):
    """No generic direction was found within the retry budget."""

    def __init__(self, report: GenericityReport):
        self.report = report
        reasons = "; ".join(report.reasons)
        super().__init__(f"no generic direction after {report.retries} retries: {reasons}")


# Results


class NonIntegralResult(SweepChiError):
    """The tangency count is not an integer, which means a tangency was missed."""

    def __init__(self, value: float):
        self.value = value
        super().__init__(f"tangency count {value!r} is not an integer")


class OnBoundary(SweepChiError):
    """A membership query landed on a boundary curve."""

    def __init__(self, point, distance: float):
        self.point = point
        self.distance = distance
        super().__init__(f"point {tuple(point)} is {distance:.3g} from the boundary")


class ResolutionTooCoarse(SweepChiError):
    """The cell grid cannot separate the boundary curves."""


class UnsupportedSurface(SweepChiError):
    """The operation only applies to a particular catalog surface."""


# Scenes


class SceneError(SweepChiError):
    """Base class for scene loading problems."""


class SceneParseError(SceneError):
    """The scene file is not valid JSON or does not match the schema."""


class SceneValidationError(SceneError):
    """The scene parses but violates a geometric invariant."""

    def __init__(self, invariant: str, detail: str = ""):
        self.invariant = invariant
        message = invariant if not detail else f"{invariant}: {detail}"
        super().__init__(message)


class SceneNotFound(SceneError):
    """No catalog scene or scene file matches the reference."""
