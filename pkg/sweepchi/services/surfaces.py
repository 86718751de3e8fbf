"""Catalog surfaces with closed-form first and second partials.

Every surface maps a parameter rectangle (periodic in the directions flagged
by ``wraps``) into R^3. Jets are vectorized: ``s`` and ``t`` may be arrays of
any matching shape and every returned vector has a trailing axis of size 3.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from numpy.polynomial import polynomial as npoly
from scipy.spatial import cKDTree
from scipy.spatial.transform import Rotation

from sweepchi.models.schemas import (
    EllipsoidSpec,
    GraphSpec,
    PlaneSpec,
    SphereSpec,
    SurfaceSpec,
    TorusSpec,
)

TWO_PI = 2.0 * math.pi


class SurfaceJet(NamedTuple):
    """Position and partial derivatives of a chart, each with shape (..., 3)."""

    P: np.ndarray
    Ps: np.ndarray
    Pt: np.ndarray
    Pss: np.ndarray
    Pst: np.ndarray
    Ptt: np.ndarray


def _vec(x, y, z) -> np.ndarray:
    x, y, z = np.broadcast_arrays(np.asarray(x, float), np.asarray(y, float), np.asarray(z, float))
    return np.stack([x, y, z], axis=-1)


class ParametricSurface(ABC):
    """A regular chart P(s, t) over a parameter rectangle."""

    kind: str = ""

    @property
    @abstractmethod
    def bounds(self) -> tuple[tuple[float, float], tuple[float, float]]: ...

    @property
    @abstractmethod
    def wraps(self) -> tuple[bool, bool]: ...

    @abstractmethod
    def jet(self, s, t) -> SurfaceJet: ...

    @abstractmethod
    def locate(self, x: np.ndarray) -> np.ndarray | None:
        """Chart coordinates of a point of the surface, or None if it is off the chart."""

    @abstractmethod
    def to_spec(self) -> SurfaceSpec: ...

    @property
    def is_plane(self) -> bool:
        return False

    @property
    def is_unit_sphere(self) -> bool:
        return False

    @property
    def periods(self) -> tuple[float, float]:
        """Period of each parameter direction, 0.0 where it does not wrap."""
        return tuple(
            hi - lo if wrap else 0.0
            for (lo, hi), wrap in zip(self.bounds, self.wraps, strict=True)
        )

    def evaluate(self, s, t) -> np.ndarray:
        return self.jet(s, t).P

    def wrap(self, st: np.ndarray) -> np.ndarray:
        """Reduce periodic coordinates into the fundamental rectangle."""
        st = np.array(st, dtype=float)
        for axis, ((lo, hi), wrap) in enumerate(zip(self.bounds, self.wraps, strict=True)):
            if wrap:
                st[..., axis] = lo + np.mod(st[..., axis] - lo, hi - lo)
        return st

    def in_bounds(self, st: np.ndarray) -> np.ndarray:
        """True where the non-periodic coordinates lie inside the rectangle."""
        st = np.asarray(st, dtype=float)
        inside = np.ones(st.shape[:-1], dtype=bool)
        for axis, ((lo, hi), wrap) in enumerate(zip(self.bounds, self.wraps, strict=True)):
            if not wrap:
                inside &= (st[..., axis] >= lo) & (st[..., axis] <= hi)
        return inside

    def difference(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """Minimal-image parameter difference a - b."""
        d = np.asarray(a, dtype=float) - np.asarray(b, dtype=float)
        for axis, period in enumerate(self.periods):
            if period:
                d[..., axis] = np.mod(d[..., axis] + 0.5 * period, period) - 0.5 * period
        return d

    def box_coordinates(self, st: np.ndarray) -> tuple[np.ndarray, list[float]]:
        """Map points into a box for a KD-tree with ``boxsize``.

        Periodic axes wrap exactly. A bounded axis of span L is shifted into
        [L, 2L] of a box of size 3L, so its spurious wrap is farther than any
        query radius used here.
        """
        st = np.array(st, dtype=float).reshape(-1, 2)
        box = []
        for axis, ((lo, hi), period) in enumerate(zip(self.bounds, self.periods, strict=True)):
            if period:
                st[:, axis] = np.mod(st[:, axis] - lo, period)
                box.append(period)
            else:
                span = hi - lo
                st[:, axis] = np.clip(st[:, axis] - lo + span, 0.0, np.nextafter(3.0 * span, 0.0))
                box.append(3.0 * span)
        # mod can round up to exactly the period
        for axis, size in enumerate(box):
            st[:, axis] = np.where(st[:, axis] >= size, 0.0, st[:, axis])
        return st, box

    def kdtree(self, st: np.ndarray) -> cKDTree:
        """KD-tree over parameter points with the chart's periodic topology."""
        points, box = self.box_coordinates(st)
        return cKDTree(points, boxsize=box)


@dataclass(frozen=True)
class Plane(ParametricSurface):
    """The plane z = 0 with the identity chart."""

    extent: float = 3.0
    kind: str = field(default="plane", init=False)

    @property
    def bounds(self):
        return ((-self.extent, self.extent), (-self.extent, self.extent))

    @property
    def wraps(self):
        return (False, False)

    @property
    def is_plane(self) -> bool:
        return True

    def jet(self, s, t) -> SurfaceJet:
        s, t = np.broadcast_arrays(np.asarray(s, float), np.asarray(t, float))
        zero = np.zeros_like(s)
        one = np.ones_like(s)
        flat = _vec(zero, zero, zero)
        return SurfaceJet(_vec(s, t, zero), _vec(one, zero, zero), _vec(zero, one, zero), flat, flat, flat)

    def locate(self, x):
        if abs(x[2]) > 1e-9:
            return None
        st = np.array([x[0], x[1]], dtype=float)
        return st if self.in_bounds(st) else None

    def to_spec(self) -> PlaneSpec:
        return PlaneSpec(extent=self.extent)


@dataclass(frozen=True)
class Sphere(ParametricSurface):
    """Unit sphere in longitude/latitude coordinates.

    The chart degenerates at the poles, so the latitude range stops ``margin``
    short of them.
    """

    margin: float = 0.05
    kind: str = field(default="sphere", init=False)

    @property
    def bounds(self):
        half = 0.5 * math.pi - self.margin
        return ((0.0, TWO_PI), (-half, half))

    @property
    def wraps(self):
        return (True, False)

    @property
    def is_unit_sphere(self) -> bool:
        return True

    def jet(self, s, t) -> SurfaceJet:
        s, t = np.broadcast_arrays(np.asarray(s, float), np.asarray(t, float))
        cs, ss = np.cos(s), np.sin(s)
        ct, st = np.cos(t), np.sin(t)
        zero = np.zeros_like(s)
        return SurfaceJet(
            P=_vec(ct * cs, ct * ss, st),
            Ps=_vec(-ct * ss, ct * cs, zero),
            Pt=_vec(-st * cs, -st * ss, ct),
            Pss=_vec(-ct * cs, -ct * ss, zero),
            Pst=_vec(st * ss, -st * cs, zero),
            Ptt=_vec(-ct * cs, -ct * ss, -st),
        )

    def locate(self, x):
        lat = math.asin(max(-1.0, min(1.0, float(x[2]))))
        if abs(lat) > self.bounds[1][1]:
            return None
        lon = math.atan2(float(x[1]), float(x[0])) % TWO_PI
        return np.array([lon, lat])

    def to_spec(self) -> SphereSpec:
        return SphereSpec(chart="latlong", margin=self.margin)


def _rotation_to(center: tuple[float, float, float]) -> np.ndarray:
    """Rotation matrix taking +z to the unit vector along ``center``."""
    c = np.asarray(center, dtype=float)
    c = c / np.linalg.norm(c)
    axis = np.cross([0.0, 0.0, 1.0], c)
    sin_angle = np.linalg.norm(axis)
    if sin_angle < 1e-15:
        if c[2] > 0:
            return np.eye(3)
        return Rotation.from_rotvec([math.pi, 0.0, 0.0]).as_matrix()
    angle = math.atan2(sin_angle, c[2])
    return Rotation.from_rotvec(axis / sin_angle * angle).as_matrix()


def _stereographic_jet(s, t) -> SurfaceJet:
    """Inverse stereographic projection from the south pole onto the unit sphere."""
    s, t = np.broadcast_arrays(np.asarray(s, float), np.asarray(t, float))
    inv = 1.0 / (1.0 + s * s + t * t)
    inv2 = inv * inv
    inv3 = inv2 * inv
    return SurfaceJet(
        P=_vec(2 * s * inv, 2 * t * inv, 2 * inv - 1),
        Ps=_vec(2 * inv - 4 * s * s * inv2, -4 * s * t * inv2, -4 * s * inv2),
        Pt=_vec(-4 * s * t * inv2, 2 * inv - 4 * t * t * inv2, -4 * t * inv2),
        Pss=_vec(
            -12 * s * inv2 + 16 * s**3 * inv3,
            -4 * t * inv2 + 16 * s * s * t * inv3,
            -4 * inv2 + 16 * s * s * inv3,
        ),
        Pst=_vec(
            -4 * t * inv2 + 16 * s * s * t * inv3,
            -4 * s * inv2 + 16 * s * t * t * inv3,
            16 * s * t * inv3,
        ),
        Ptt=_vec(
            -4 * s * inv2 + 16 * s * t * t * inv3,
            -12 * t * inv2 + 16 * t**3 * inv3,
            -4 * inv2 + 16 * t * t * inv3,
        ),
    )


@dataclass(frozen=True)
class Ellipsoid(ParametricSurface):
    """Ellipsoid x^2/a^2 + y^2/b^2 + z^2/c^2 = 1 in a stereographic chart.

    The unit sphere is rotated so that the chart origin lands on ``center``
    and then scaled by the semi-axes, so the only chart singularity (the
    antipode of ``center``) sits at infinity.
    """

    axes: tuple[float, float, float] = (1.0, 1.0, 1.0)
    center: tuple[float, float, float] = (0.0, 0.0, 1.0)
    extent: float = 4.0
    kind: str = field(default="ellipsoid", init=False)

    @classmethod
    def unit_sphere(cls, center=(0.0, 0.0, 1.0), extent: float = 4.0) -> Ellipsoid:
        return cls(axes=(1.0, 1.0, 1.0), center=tuple(center), extent=extent)

    @property
    def matrix(self) -> np.ndarray:
        return np.diag(self.axes) @ _rotation_to(self.center)

    @property
    def bounds(self):
        return ((-self.extent, self.extent), (-self.extent, self.extent))

    @property
    def wraps(self):
        return (False, False)

    @property
    def is_unit_sphere(self) -> bool:
        return all(a == 1.0 for a in self.axes)

    def jet(self, s, t) -> SurfaceJet:
        m = self.matrix.T
        return SurfaceJet(*(v @ m for v in _stereographic_jet(s, t)))

    def locate(self, x):
        y = np.linalg.solve(self.matrix, np.asarray(x, dtype=float))
        if 1.0 + y[2] < 1e-12:
            return None
        st = y[:2] / (1.0 + y[2])
        return st if self.in_bounds(st) else None

    def to_spec(self) -> SphereSpec | EllipsoidSpec:
        if self.is_unit_sphere:
            return SphereSpec(chart="stereographic", center=self.center, extent=self.extent)
        return EllipsoidSpec(axes=self.axes, center=self.center, extent=self.extent)


@dataclass(frozen=True)
class Torus(ParametricSurface):
    """Torus of revolution about the z axis, s the longitude and t the tube angle."""

    major_radius: float = 2.0
    minor_radius: float = 1.0
    kind: str = field(default="torus", init=False)

    @property
    def bounds(self):
        return ((0.0, TWO_PI), (0.0, TWO_PI))

    @property
    def wraps(self):
        return (True, True)

    def gauss_curvature(self, t):
        """Closed-form K, used as a reference by tests and diagnostics."""
        c = np.cos(t)
        return c / (self.minor_radius * (self.major_radius + self.minor_radius * c))

    def jet(self, s, t) -> SurfaceJet:
        s, t = np.broadcast_arrays(np.asarray(s, float), np.asarray(t, float))
        big, r = self.major_radius, self.minor_radius
        cs, ss = np.cos(s), np.sin(s)
        ct, st = np.cos(t), np.sin(t)
        w = big + r * ct
        zero = np.zeros_like(s)
        return SurfaceJet(
            P=_vec(w * cs, w * ss, r * st),
            Ps=_vec(-w * ss, w * cs, zero),
            Pt=_vec(-r * st * cs, -r * st * ss, r * ct),
            Pss=_vec(-w * cs, -w * ss, zero),
            Pst=_vec(r * st * ss, -r * st * cs, zero),
            Ptt=_vec(-r * ct * cs, -r * ct * ss, -r * st),
        )

    def locate(self, x):
        s = math.atan2(float(x[1]), float(x[0])) % TWO_PI
        radial = math.hypot(float(x[0]), float(x[1])) - self.major_radius
        t = math.atan2(float(x[2]), radial) % TWO_PI
        return np.array([s, t])

    def to_spec(self) -> TorusSpec:
        return TorusSpec(major_radius=self.major_radius, minor_radius=self.minor_radius)


@dataclass(frozen=True)
class Graph(ParametricSurface):
    """Graph z = f(x, y) of a polynomial, ``coefficients[i][j]`` multiplying x^i y^j."""

    coefficients: tuple[tuple[float, ...], ...] = ((0.0,),)
    extent: float = 2.0
    kind: str = field(default="graph", init=False)

    @property
    def bounds(self):
        return ((-self.extent, self.extent), (-self.extent, self.extent))

    @property
    def wraps(self):
        return (False, False)

    def _poly(self, s, t, ds: int = 0, dt: int = 0):
        c = np.array(self.coefficients, dtype=float)
        if ds:
            c = npoly.polyder(c, m=ds, axis=0)
        if dt:
            c = npoly.polyder(c, m=dt, axis=1)
        return npoly.polyval2d(s, t, c)

    def jet(self, s, t) -> SurfaceJet:
        s, t = np.broadcast_arrays(np.asarray(s, float), np.asarray(t, float))
        zero = np.zeros_like(s)
        one = np.ones_like(s)
        return SurfaceJet(
            P=_vec(s, t, self._poly(s, t)),
            Ps=_vec(one, zero, self._poly(s, t, ds=1)),
            Pt=_vec(zero, one, self._poly(s, t, dt=1)),
            Pss=_vec(zero, zero, self._poly(s, t, ds=2)),
            Pst=_vec(zero, zero, self._poly(s, t, ds=1, dt=1)),
            Ptt=_vec(zero, zero, self._poly(s, t, dt=2)),
        )

    def locate(self, x):
        st = np.array([x[0], x[1]], dtype=float)
        if abs(float(self._poly(st[0], st[1])) - x[2]) > 1e-9:
            return None
        return st if self.in_bounds(st) else None

    def to_spec(self) -> GraphSpec:
        return GraphSpec(coefficients=[list(row) for row in self.coefficients], extent=self.extent)


def build_surface(spec: SurfaceSpec) -> ParametricSurface:
    """Instantiate the catalog surface described by a scene-file spec."""
    match spec:
        case PlaneSpec():
            return Plane(extent=spec.extent)
        case SphereSpec(chart="latlong"):
            return Sphere(margin=spec.margin)
        case SphereSpec():
            return Ellipsoid.unit_sphere(center=spec.center, extent=spec.extent)
        case EllipsoidSpec():
            return Ellipsoid(axes=tuple(spec.axes), center=tuple(spec.center), extent=spec.extent)
        case TorusSpec():
            return Torus(major_radius=spec.major_radius, minor_radius=spec.minor_radius)
        case GraphSpec():
            return Graph(
                coefficients=tuple(tuple(row) for row in spec.coefficients),
                extent=spec.extent,
            )
    raise ValueError(f"unknown surface spec: {spec!r}")
