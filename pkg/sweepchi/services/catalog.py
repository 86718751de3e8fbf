"""Built-in validation scenes with known Euler characteristics."""

from __future__ import annotations

import math
from collections.abc import Callable

from sweepchi.core.config import Settings, get_settings
from sweepchi.core.errors import SceneNotFound
from sweepchi.services.curves import TWO_PI, BoundaryCurve
from sweepchi.services.domain import Domain, Scene, validate_domain
from sweepchi.services.surfaces import Ellipsoid, Graph, Plane, Sphere, Torus

SceneBuilder = Callable[[int], Scene]

_BUILDERS: dict[str, SceneBuilder] = {}


def register(builder: SceneBuilder) -> SceneBuilder:
    """Register a catalog scene under its builder's name, dashed."""
    _BUILDERS[builder.__name__.strip("_").replace("_", "-")] = builder
    return builder


def circle(center, radius, clockwise=False) -> BoundaryCurve:
    return BoundaryCurve.circle(center, radius, clockwise=clockwise)


@register
def disk(samples: int) -> Scene:
    domain = Domain(Plane(), (circle((0, 0), 1.0),), (0.0, 0.0), 1, samples)
    return Scene("disk", domain, "unit disk in the plane")


@register
def annulus(samples: int) -> Scene:
    boundaries = (circle((0, 0), 2.0), circle((0, 0), 1.0, clockwise=True))
    domain = Domain(Plane(), boundaries, (1.5, 0.0), 0, samples)
    return Scene("annulus", domain, "planar annulus 1 < r < 2")


@register
def disk_2_holes(samples: int) -> Scene:
    boundaries = (
        circle((0, 0), 2.0),
        circle((-0.9, 0), 0.5, clockwise=True),
        circle((0.9, 0), 0.5, clockwise=True),
    )
    domain = Domain(Plane(), boundaries, (0.0, 1.2), -1, samples)
    return Scene("disk-2-holes", domain, "disk of radius 2 with two holes of radius 1/2")


@register
def two_disks(samples: int) -> Scene:
    boundaries = (circle((-1.2, 0), 0.8), circle((1.2, 0), 0.8))
    domain = Domain(Plane(), boundaries, (-1.2, 0.0), 2, samples)
    return Scene("two-disks", domain, "two disjoint planar disks")


@register
def cap(samples: int) -> Scene:
    # stereographic radius tan(gamma/2) of a cap of half-angle gamma = pi/3
    boundary = circle((0, 0), math.tan(math.pi / 6))
    domain = Domain(Ellipsoid.unit_sphere(), (boundary,), (0.0, 0.0), 1, samples)
    return Scene("cap", domain, "spherical cap of half-angle pi/3 about the north pole")


@register
def cap_complement(samples: int) -> Scene:
    boundary = circle((0, 0), math.tan(math.pi / 3))
    surface = Ellipsoid.unit_sphere(center=(0.0, 0.0, -1.0))
    domain = Domain(surface, (boundary,), (0.0, 0.0), 1, samples)
    return Scene("cap-complement", domain, "unit sphere minus a polar cap of half-angle pi/3")


@register
def band(samples: int) -> Scene:
    boundaries = (
        BoundaryCurve.coordinate_loop(-math.pi / 6, TWO_PI),
        BoundaryCurve.coordinate_loop(math.pi / 6, TWO_PI, decreasing=True),
    )
    domain = Domain(Sphere(), boundaries, (0.0, 0.0), 0, samples)
    return Scene("band", domain, "spherical band between latitudes -pi/6 and pi/6")


@register
def torus(samples: int) -> Scene:
    domain = Domain(Torus(), (), (0.0, 0.0), 0, samples)
    return Scene("torus", domain, "closed torus of radii 2 and 1")


@register
def torus_minus_disk(samples: int) -> Scene:
    hole = circle((math.pi, 0.0), 0.5, clockwise=True)
    domain = Domain(Torus(), (hole,), (0.0, math.pi), -1, samples)
    return Scene("torus-minus-disk", domain, "torus with one disk removed at the outer equator")


@register
def torus_band(samples: int) -> Scene:
    boundaries = (
        BoundaryCurve.coordinate_loop(-0.5, TWO_PI),
        BoundaryCurve.coordinate_loop(0.5, TWO_PI, decreasing=True),
    )
    domain = Domain(Torus(), boundaries, (0.0, 0.0), 0, samples)
    return Scene("torus-band", domain, "annular strip |t| < 1/2 around the outer equator")


@register
def saddle_disk(samples: int) -> Scene:
    surface = Graph(coefficients=((0.0, 0.0, -0.5), (0.0, 0.0, 0.0), (0.5, 0.0, 0.0)))
    domain = Domain(surface, (circle((0, 0), 1.0),), (0.0, 0.0), 1, samples)
    return Scene("saddle-disk", domain, "unit disk on the saddle z = (x^2 - y^2)/2")


@register
def ellipsoid_cap(samples: int) -> Scene:
    surface = Ellipsoid(axes=(1.5, 1.0, 0.75))
    domain = Domain(surface, (circle((0, 0), 0.8),), (0.0, 0.0), 1, samples)
    return Scene("ellipsoid-cap", domain, "cap of the ellipsoid with semi-axes 1.5, 1, 0.75")


def scene_names() -> list[str]:
    return list(_BUILDERS)


def catalog(settings: Settings | None = None) -> list[Scene]:
    """All built-in scenes, each with its reference Euler characteristic."""
    settings = settings or get_settings()
    return [builder(settings.samples) for builder in _BUILDERS.values()]


def get_scene(name: str, settings: Settings | None = None, validate: bool = True) -> Scene:
    """Look up a catalog scene by name."""
    settings = settings or get_settings()
    try:
        builder = _BUILDERS[name]
    except KeyError:
        raise SceneNotFound(f"unknown scene {name!r}; try one of {', '.join(_BUILDERS)}") from None
    found = builder(settings.samples)
    if validate:
        validate_domain(found.domain, settings)
    return found
