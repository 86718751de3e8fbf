"""Differential geometry of catalog surfaces and of curves drawn on them.

All functions broadcast over leading axes: parameter points have a trailing
axis of size 2, vectors in R^3 a trailing axis of size 3.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from sweepchi.core.config import Settings, get_settings
from sweepchi.core.errors import (
    DegenerateChart,
    NonTransverseSection,
    ProjectionUndefined,
    SingularCurvePoint,
)
from sweepchi.models.records import SphericalCoords
from sweepchi.services.curves import BoundaryCurve
from sweepchi.services.surfaces import ParametricSurface, SurfaceJet


class SurfaceGeometry(NamedTuple):
    """Unit normal, fundamental forms and Gauss curvature at chart points."""

    N: np.ndarray
    E: np.ndarray
    F: np.ndarray
    G: np.ndarray
    e: np.ndarray
    f: np.ndarray
    g: np.ndarray
    K: np.ndarray

    @property
    def area_element(self) -> np.ndarray:
        return np.sqrt(self.E * self.G - self.F * self.F)


class CurveGeometry(NamedTuple):
    """Frame and curvatures of a boundary curve, normalized to arc length.

    ``acceleration`` is the arc-length second derivative, k_n N + k_g n.
    """

    y: np.ndarray
    T: np.ndarray
    n: np.ndarray
    N: np.ndarray
    k_g: np.ndarray
    k_n: np.ndarray
    speed: np.ndarray
    acceleration: np.ndarray


def dot(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.einsum("...i,...i->...", a, b)


def as_direction(u, settings: Settings | None = None) -> np.ndarray:
    """Normalize a 2- or 3-component direction; planar input gets z = 0."""
    settings = settings or get_settings()
    u = np.asarray(u, dtype=float).ravel()
    if u.shape == (2,):
        u = np.append(u, 0.0)
    if u.shape != (3,):
        raise ValueError("direction must have 2 or 3 components")
    norm = float(np.linalg.norm(u))
    if not math.isfinite(norm) or norm <= settings.unit_tol:
        raise ValueError("direction must be non-zero")
    return u / norm


def random_direction(rng: np.random.Generator) -> np.ndarray:
    """Uniform sample on the unit sphere."""
    while True:
        v = rng.standard_normal(3)
        norm = np.linalg.norm(v)
        if norm > 1e-8:
            return v / norm


def orthonormal_frame(u: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Unit vectors e1, e2 such that (e1, e2, u) is a right-handed frame."""
    u = np.asarray(u, dtype=float)
    helper = np.eye(3)[int(np.argmin(np.abs(u)))]
    e1 = np.cross(helper, u)
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(u, e1)
    return e1, e2


def fundamental_forms(jet: SurfaceJet, settings: Settings | None = None) -> SurfaceGeometry:
    settings = settings or get_settings()
    cross = np.cross(jet.Ps, jet.Pt)
    norm = np.linalg.norm(cross, axis=-1)
    if np.any(norm < settings.chart_tol):
        raise DegenerateChart(f"|P_s x P_t| = {float(np.min(norm)):.3g} below {settings.chart_tol:g}")
    N = cross / norm[..., None]
    E, F, G = dot(jet.Ps, jet.Ps), dot(jet.Ps, jet.Pt), dot(jet.Pt, jet.Pt)
    e, f, g = dot(jet.Pss, N), dot(jet.Pst, N), dot(jet.Ptt, N)
    K = (e * g - f * f) / (E * G - F * F)
    return SurfaceGeometry(N, E, F, G, e, f, g, K)


def surface_geometry(
    surface: ParametricSurface, p, settings: Settings | None = None
) -> SurfaceGeometry:
    """Normal, fundamental forms and K at parameter point(s) ``p``."""
    p = np.asarray(p, dtype=float)
    return fundamental_forms(surface.jet(p[..., 0], p[..., 1]), settings)


class CurveJet(NamedTuple):
    """A curve pushed onto the surface: parameter jet, surface jet and the
    first two tau-derivatives of alpha = P(q(tau))."""

    q: np.ndarray
    dq: np.ndarray
    surface: SurfaceJet
    velocity: np.ndarray
    acceleration: np.ndarray


def curve_jet(surface: ParametricSurface, curve: BoundaryCurve, tau) -> CurveJet:
    q, dq, ddq = curve.jet(tau)
    jet = surface.jet(q[..., 0], q[..., 1])
    ds, dt = dq[..., 0:1], dq[..., 1:2]
    velocity = jet.Ps * ds + jet.Pt * dt
    acceleration = (
        jet.Pss * ds * ds
        + 2.0 * jet.Pst * ds * dt
        + jet.Ptt * dt * dt
        + jet.Ps * ddq[..., 0:1]
        + jet.Pt * ddq[..., 1:2]
    )
    return CurveJet(q, dq, jet, velocity, acceleration)


def curve_frames(
    surface: ParametricSurface, curve: BoundaryCurve, tau, settings: Settings | None = None
) -> CurveGeometry:
    """Vectorized :func:`curve_geometry` over an array of curve parameters."""
    settings = settings or get_settings()
    cj = curve_jet(surface, curve, tau)
    speed = np.linalg.norm(cj.velocity, axis=-1)
    if np.any(speed < settings.chart_tol):
        raise SingularCurvePoint(f"curve velocity {float(np.min(speed)):.3g} vanishes")
    T = cj.velocity / speed[..., None]
    # arc-length acceleration: strip the tangential part and rescale by |alpha'|^2
    tangential = dot(cj.acceleration, T)[..., None] * T
    kappa = (cj.acceleration - tangential) / (speed * speed)[..., None]
    N = fundamental_forms(cj.surface, settings).N
    n = np.cross(N, T)
    return CurveGeometry(
        y=cj.surface.P,
        T=T,
        n=n,
        N=N,
        k_g=dot(kappa, n),
        k_n=dot(kappa, N),
        speed=speed,
        acceleration=kappa,
    )


def curve_geometry(
    surface: ParametricSurface, curve: BoundaryCurve, tau: float, settings: Settings | None = None
) -> CurveGeometry:
    """Arc-length frame {T, n, N} and curvatures k_g, k_n at one curve point."""
    return curve_frames(surface, curve, np.asarray(float(tau)), settings)


def section_curve_curvature(
    surface_geom: SurfaceGeometry,
    curve_geom: CurveGeometry,
    u: np.ndarray,
    settings: Settings | None = None,
):
    """Geodesic curvature k_g^u of the plane section through a boundary tangency.

    From 0 = <u, beta''> = k_n <u, N> + k_g^u <u, n>.
    """
    settings = settings or get_settings()
    un = dot(curve_geom.n, u)
    if np.any(np.abs(un) < settings.tol_n):
        raise NonTransverseSection(f"<u, n> = {float(np.min(np.abs(un))):.3g}")
    return -curve_geom.k_n * dot(surface_geom.N, u) / un


def tangential_projection(
    surface_geom: SurfaceGeometry, u: np.ndarray, settings: Settings | None = None
) -> np.ndarray:
    """Normalized projection of u onto the tangent plane."""
    settings = settings or get_settings()
    N = surface_geom.N
    v = u - dot(u, N)[..., None] * N
    norm = np.linalg.norm(v, axis=-1)
    if np.any(norm < settings.projection_tol):
        raise ProjectionUndefined("direction is normal to the surface")
    return v / norm[..., None]


def pullback(surface_geom: SurfaceGeometry, jet: SurfaceJet, v: np.ndarray) -> np.ndarray:
    """Parameter-space vector (a, b) with a P_s + b P_t equal to the tangent vector v."""
    rhs_s, rhs_t = dot(v, jet.Ps), dot(v, jet.Pt)
    E, F, G = surface_geom.E, surface_geom.F, surface_geom.G
    det = E * G - F * F
    return np.stack([(G * rhs_s - F * rhs_t) / det, (E * rhs_t - F * rhs_s) / det], axis=-1)


def spherical_coords(y, u) -> SphericalCoords:
    """Longitude about u and polar distance from u of a point on the unit sphere."""
    y = np.asarray(y, dtype=float)
    u = np.asarray(u, dtype=float)
    e1, e2 = orthonormal_frame(u)
    axial = float(dot(y, u))
    radial = math.hypot(float(dot(y, e1)), float(dot(y, e2)))
    theta = math.atan2(float(dot(y, e2)), float(dot(y, e1))) % (2.0 * math.pi)
    return SphericalCoords(theta=theta, gamma=math.atan2(radial, axial))


def from_spherical(coords: SphericalCoords, u) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    e1, e2 = orthonormal_frame(u)
    sin_gamma = math.sin(coords.gamma)
    return (
        sin_gamma * (math.cos(coords.theta) * e1 + math.sin(coords.theta) * e2)
        + math.cos(coords.gamma) * u
    )
