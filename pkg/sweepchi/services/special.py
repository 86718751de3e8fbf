"""Specialized tangency counts for planar domains and domains on the unit sphere.

On the plane only the boundary contributes, signed by its curvature. On the
unit sphere the interior critical points of any height function are the
poles u and -u, so those counts reduce to pole membership plus a boundary
sum, taken against the parallels or the meridians of u.
"""

from __future__ import annotations

import logging
import math

import numpy as np

from sweepchi.core.config import Settings, get_settings
from sweepchi.core.errors import (
    DegenerateBoundaryTangency,
    DegenerateMeridianTangency,
    PoleOnBoundary,
    SceneValidationError,
    UnsupportedSurface,
)
from sweepchi.models.records import TangencyEvent
from sweepchi.models.schemas import EventKind, Method
from sweepchi.services.curves import BoundaryCurve
from sweepchi.services.domain import Domain, validate_domain
from sweepchi.services.geometry import (
    as_direction,
    curve_frames,
    curve_jet,
    dot,
    orthonormal_frame,
    spherical_coords,
)
from sweepchi.services.sweep import (
    SweepResult,
    curve_roots,
    height_critical_parameters,
    retry_generic,
)

logger = logging.getLogger(__name__)


def _require_plane(domain: Domain) -> None:
    if not domain.surface.is_plane:
        raise UnsupportedSurface(f"planar count needs the plane chart, not {domain.surface.kind}")


def _require_unit_sphere(domain: Domain) -> None:
    if not domain.surface.is_unit_sphere:
        raise UnsupportedSurface(f"sphere counts need the unit sphere, not {domain.surface.kind}")


def _boundary_event(frames, k: int, curve_index: int, tau: float, param, level: float, **fields):
    return TangencyEvent(
        kind=EventKind.BOUNDARY,
        level=float(level),
        param=(float(param[0]), float(param[1])),
        point=tuple(float(v) for v in frames.y[k]),
        curve=curve_index,
        tau=float(tau),
        geodesic_curvature=float(frames.k_g[k]),
        normal_alignment=None,
        **fields,
    )


def planar_tangencies(domain: Domain, u, settings: Settings | None = None) -> list[TangencyEvent]:
    """Boundary points with n = +-u, signed by the plane curvature there.

    A direction with a normal component is replaced by its in-plane part.
    """
    settings = settings or get_settings()
    _require_plane(domain)
    u = as_direction(u, settings)
    # planes normal to u cut the plane z = 0 in lines normal to its in-plane part
    in_plane = math.hypot(u[0], u[1])
    if in_plane < settings.tol_n:
        raise DegenerateBoundaryTangency("direction is normal to the plane")
    u = np.array([u[0], u[1], 0.0]) / in_plane
    surface = domain.surface
    events = []
    for index, curve in enumerate(domain.boundaries):
        roots = height_critical_parameters(domain, index, u, settings)
        if not len(roots):
            continue
        frames = curve_frames(surface, curve, roots, settings)
        q = curve.points(roots)
        for k, tau in enumerate(roots):
            curvature = frames.k_g[k]
            if abs(curvature) < settings.tol_kg:
                raise DegenerateBoundaryTangency(
                    f"curvature {curvature:.3g} on curve {index} at tau={tau:.6f}"
                )
            events.append(
                _boundary_event(
                    frames,
                    k,
                    index,
                    tau,
                    q[k],
                    dot(frames.y[k], u),
                    index=1 if curvature > 0 else -1,
                    section_curvature=0.0,
                )
            )
    return events


def pole_events(domain: Domain, u, settings: Settings | None = None) -> list[TangencyEvent]:
    """The poles u and -u that lie in D, each an extreme of h_u with K = 1."""
    settings = settings or get_settings()
    u = as_direction(u, settings)
    events = []
    for pole in (u, -u):
        param = domain.surface.locate(pole)
        if param is None:
            continue
        if domain.boundaries:
            gap = domain.distance_to_boundary(param)
            if gap < settings.pole_tol:
                raise PoleOnBoundary(f"pole {tuple(pole)} is {gap:.3g} from the boundary")
        if domain.contains_many(param)[0]:
            events.append(
                TangencyEvent(
                    kind=EventKind.INTERIOR,
                    level=float(dot(pole, u)),
                    param=(float(param[0]), float(param[1])),
                    point=tuple(float(v) for v in pole),
                    index=1,
                    gauss_curvature=1.0,
                )
            )
    return events


def parallel_tangencies(
    domain: Domain, u, settings: Settings | None = None
) -> list[TangencyEvent]:
    """Boundary points tangent to a parallel of u, signed by k_g + tan(psi).

    The parallel through y, oriented like the boundary, has geodesic
    curvature -tan(psi) = <y, u> / <u, n>, psi being the latitude of y seen
    from the pole that n points away from.
    """
    settings = settings or get_settings()
    _require_unit_sphere(domain)
    u = as_direction(u, settings)
    surface = domain.surface
    events = []
    for index, curve in enumerate(domain.boundaries):
        roots = height_critical_parameters(domain, index, u, settings)
        if not len(roots):
            continue
        frames = curve_frames(surface, curve, roots, settings)
        q = curve.points(roots)
        axial = dot(frames.y, u)
        across = dot(frames.n, u)
        for k, tau in enumerate(roots):
            if math.sqrt(max(0.0, 1.0 - axial[k] ** 2)) < settings.pole_tol:
                raise PoleOnBoundary(f"curve {index} passes a pole of u at tau={tau:.6f}")
            parallel = axial[k] / across[k]
            gap = frames.k_g[k] - parallel
            if abs(gap) < settings.tol_kg:
                raise DegenerateBoundaryTangency(
                    f"boundary osculates a parallel on curve {index} at tau={tau:.6f}"
                )
            events.append(
                _boundary_event(
                    frames,
                    k,
                    index,
                    tau,
                    surface.wrap(q[k]),
                    axial[k],
                    index=1 if gap > 0 else -1,
                    section_curvature=float(parallel),
                )
            )
    return events


def meridian_tangencies(
    domain: Domain, u, settings: Settings | None = None
) -> list[TangencyEvent]:
    """Boundary points tangent to a meridian of u, signed by k_g.

    These are the critical points of the longitude theta_u along each curve,
    found as zeros of x1 x2' - x2 x1' in a frame (e1, e2, u).
    """
    settings = settings or get_settings()
    _require_unit_sphere(domain)
    u = as_direction(u, settings)
    e1, e2 = orthonormal_frame(u)
    surface = domain.surface
    events = []
    for index, curve in enumerate(domain.boundaries):

        def turning(tau, curve=curve):
            cj = curve_jet(surface, curve, tau)
            x1, x2 = dot(cj.surface.P, e1), dot(cj.surface.P, e2)
            return x1 * dot(cj.velocity, e2) - x2 * dot(cj.velocity, e1)

        roots = curve_roots(domain, index, turning, settings, what="longitude")
        if not len(roots):
            continue
        frames = curve_frames(surface, curve, roots, settings)
        q = curve.points(roots)
        for k, tau in enumerate(roots):
            coords = spherical_coords(frames.y[k], u)
            if min(coords.gamma, math.pi - coords.gamma) < settings.pole_tol:
                raise PoleOnBoundary(f"curve {index} passes a pole of u at tau={tau:.6f}")
            curvature = frames.k_g[k]
            if abs(curvature) < settings.tol_kg:
                raise DegenerateMeridianTangency(
                    f"k_g = {curvature:.3g} on curve {index} at tau={tau:.6f}"
                )
            events.append(
                _boundary_event(
                    frames,
                    k,
                    index,
                    tau,
                    surface.wrap(q[k]),
                    coords.theta,
                    index=1 if curvature > 0 else -1,
                    section_curvature=0.0,
                )
            )
    return events


def special_sweep(
    method: Method,
    domain: Domain,
    u,
    rng: np.random.Generator | None = None,
    settings: Settings | None = None,
) -> SweepResult:
    """Events of one of the specialized counts at the first generic direction near u."""
    settings = settings or get_settings()
    match method:
        case Method.PLANAR:
            _require_plane(domain)

            def count(direction):
                return [], planar_tangencies(domain, direction, settings)

        case Method.PARALLELS:
            _require_unit_sphere(domain)

            def count(direction):
                return (
                    pole_events(domain, direction, settings),
                    parallel_tangencies(domain, direction, settings),
                )

        case Method.MERIDIANS:
            _require_unit_sphere(domain)

            def count(direction):
                return (
                    pole_events(domain, direction, settings),
                    meridian_tangencies(domain, direction, settings),
                )

        case _:
            raise ValueError(f"{method.value} is not a specialized count")
    (interior, boundary), report = retry_generic(count, u, rng, settings)
    return SweepResult(report.direction, interior, boundary, report)


def chi_planar(
    domain: Domain, u, rng: np.random.Generator | None = None, settings: Settings | None = None
) -> int:
    """chi(D) = 1/2 sum of sign k over boundary points with n = +-u."""
    return special_sweep(Method.PLANAR, domain, u, rng, settings).chi(settings)


def chi_sphere_parallels(
    domain: Domain, u, rng: np.random.Generator | None = None, settings: Settings | None = None
) -> int:
    """chi(D) = 1/2 sum of sign(k_g + tan psi) + #({u, -u} in D)."""
    return special_sweep(Method.PARALLELS, domain, u, rng, settings).chi(settings)


def chi_sphere_meridians(
    domain: Domain, u, rng: np.random.Generator | None = None, settings: Settings | None = None
) -> int:
    """chi(D) = 1/2 sum of sign k_g over meridian tangencies + #({u, -u} in D)."""
    return special_sweep(Method.MERIDIANS, domain, u, rng, settings).chi(settings)


def excise_poles(domain: Domain, u, radius: float = 0.05, settings: Settings | None = None) -> Domain:
    """D minus small disks around whichever of u, -u lie in D.

    chi(D) equals chi of the result plus the number of poles removed.
    """
    settings = settings or get_settings()
    u = as_direction(u, settings)
    holes, centers = [], []
    for pole in (u, -u):
        param = domain.surface.locate(pole)
        if param is None or not domain.contains_many(param)[0]:
            continue
        if domain.boundaries and domain.distance_to_boundary(param) < 3.0 * radius:
            raise PoleOnBoundary(f"pole {tuple(pole)} is too close to the boundary to excise")
        holes.append(BoundaryCurve.circle(param, radius, clockwise=True))
        centers.append(param)
    seed = np.asarray(domain.seed, dtype=float)
    if any(np.linalg.norm(domain.surface.difference(seed, c)) < 2.0 * radius for c in centers):
        seed = _seed_away_from(domain, centers, radius)
    excised = Domain(
        surface=domain.surface,
        boundaries=domain.boundaries + tuple(holes),
        seed=(float(seed[0]), float(seed[1])),
        reference_chi=None if domain.reference_chi is None else domain.reference_chi - len(holes),
        samples=domain.samples,
    )
    logger.debug("excised %d pole(s) with radius %g", len(holes), radius)
    return validate_domain(excised, settings)


def _seed_away_from(domain: Domain, centers, radius: float) -> np.ndarray:
    for center in centers:
        for angle in np.linspace(0.0, 2.0 * math.pi, 8, endpoint=False):
            candidate = center + 3.0 * radius * np.array([math.cos(angle), math.sin(angle)])
            clear = all(
                np.linalg.norm(domain.surface.difference(candidate, c)) > 2.0 * radius
                for c in centers
            )
            if clear and domain.contains_many(candidate)[0]:
                if domain.is_closed or domain.distance_to_boundary(candidate) > radius:
                    return candidate
    raise SceneValidationError("no seed left after excising the poles")
