"""Domains with boundary on a catalog surface.

Membership is decided by crossing parity against a declared interior seed:
a point is in D when a path from the seed to it crosses the boundary an even
number of times. Paths are taken in two axis-aligned legs, first along the
seed's column, then along the point's row, so every query reduces to sorted
crossing positions on coordinate lines.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np
from pydantic import ValidationError
from scipy.optimize import minimize_scalar

from sweepchi.core.config import Settings, get_settings
from sweepchi.core.errors import (
    DegenerateChart,
    OnBoundary,
    SceneNotFound,
    SceneParseError,
    SceneValidationError,
    SingularCurvePoint,
)
from sweepchi.models.schemas import SceneFile
from sweepchi.services.curves import TWO_PI, BoundaryCurve
from sweepchi.services.geometry import curve_frames, fundamental_forms, pullback
from sweepchi.services.surfaces import ParametricSurface, build_surface

logger = logging.getLogger(__name__)

LEVEL_CHUNK = 256
BISECTION_STEPS = 60
EDGE_SAMPLES = 257


def _bisect(f, a: np.ndarray, b: np.ndarray, steps: int = BISECTION_STEPS) -> np.ndarray:
    """Vectorized bisection on brackets [a, b] where f changes sign."""
    a = np.array(a, dtype=float)
    b = np.array(b, dtype=float)
    fa = f(a)
    for _ in range(steps):
        m = 0.5 * (a + b)
        fm = f(m)
        left = np.signbit(fm) == np.signbit(fa)
        a = np.where(left, m, a)
        fa = np.where(left, fm, fa)
        b = np.where(left, b, m)
    return 0.5 * (a + b)


def _segment_hits(a: np.ndarray, b: np.ndarray, q: np.ndarray) -> int:
    """Proper crossings of segment ab with the polyline q."""
    d = b - a
    q0, q1 = q[:-1], q[1:]
    e = q1 - q0
    side0 = d[0] * (q0[:, 1] - a[1]) - d[1] * (q0[:, 0] - a[0])
    side1 = d[0] * (q1[:, 1] - a[1]) - d[1] * (q1[:, 0] - a[0])
    sa = e[:, 0] * (a[1] - q0[:, 1]) - e[:, 1] * (a[0] - q0[:, 0])
    sb = e[:, 0] * (b[1] - q0[:, 1]) - e[:, 1] * (b[0] - q0[:, 0])
    hits = (np.signbit(side0) != np.signbit(side1)) & (np.signbit(sa) != np.signbit(sb))
    return int(np.count_nonzero(hits))


@dataclass(frozen=True)
class RowScan:
    """Boundary crossings along one coordinate line of the chart.

    ``axis`` is the coordinate held fixed at ``level``; ``crossings`` are the
    sorted positions along the other coordinate, reduced into the rectangle.
    Membership along the line is known at ``origin``.
    """

    axis: int
    level: float
    crossings: np.ndarray
    origin: float
    origin_inside: bool
    span: tuple[float, float]

    def contains(self, positions) -> np.ndarray:
        positions = np.asarray(positions, dtype=float)
        passed = np.searchsorted(self.crossings, positions) - np.searchsorted(
            self.crossings, self.origin
        )
        return (passed % 2 == 0) == self.origin_inside

    def intervals(self) -> list[tuple[float, float]]:
        """Maximal sub-intervals of the line inside D."""
        lo, hi = self.span
        cuts = self.crossings[(self.crossings > lo) & (self.crossings < hi)]
        edges = np.concatenate([[lo], cuts, [hi]])
        mids = 0.5 * (edges[:-1] + edges[1:])
        inside = self.contains(mids)
        return [
            (float(x0), float(x1))
            for x0, x1, keep in zip(edges[:-1], edges[1:], inside, strict=True)
            if keep and x1 > x0
        ]


@dataclass(frozen=True)
class Domain:
    """A compact domain D on a surface, bounded by closed parameter curves.

    An empty boundary means D is the whole (closed) surface.
    """

    surface: ParametricSurface
    boundaries: tuple[BoundaryCurve, ...] = ()
    seed: tuple[float, float] = (0.0, 0.0)
    reference_chi: int | None = None
    samples: int = 4096

    @property
    def is_closed(self) -> bool:
        return not self.boundaries

    @cached_property
    def origin(self) -> np.ndarray:
        """The seed reduced into the fundamental rectangle."""
        return self.surface.wrap(np.asarray(self.seed, dtype=float))

    @cached_property
    def lifted(self) -> list[tuple[np.ndarray, np.ndarray]]:
        """Per curve: ``samples + 1`` parameters and lifted points closing the loop."""
        return [curve.lifted_samples(self.samples) for curve in self.boundaries]

    @cached_property
    def _sample_index(self):
        points = [q[:-1] for _, q in self.lifted]
        if not points:
            return None, np.empty((0, 2), dtype=int)
        owners = np.concatenate(
            [
                np.stack([np.full(len(p), i), np.arange(len(p))], axis=-1)
                for i, p in enumerate(points)
            ]
        )
        return self.surface.kdtree(np.concatenate(points)), owners

    def _axis_crossings(self, axis: int, levels) -> list[np.ndarray]:
        """Sorted crossing positions of the boundary with the lines x[axis] = level."""
        levels = np.atleast_1d(np.asarray(levels, dtype=float))
        free = 1 - axis
        period = self.surface.periods[axis]
        free_period = self.surface.periods[free]
        free_lo = self.surface.bounds[free][0]
        found: list[list[np.ndarray]] = [[] for _ in levels]
        for curve, (tau, q) in zip(self.boundaries, self.lifted, strict=True):
            values = q[:, axis]
            for start in range(0, len(levels), LEVEL_CHUNK):
                chunk = levels[start : start + LEVEL_CHUNK]
                offset = values[None, :] - chunk[:, None]
                # bins change wherever the curve passes a copy of the level line
                bins = np.floor(offset / period) if period else (offset >= 0).astype(float)
                rows, segs = np.nonzero(bins[:, 1:] != bins[:, :-1])
                if not rows.size:
                    continue
                target = chunk[rows]
                if period:
                    target = target + period * np.maximum(bins[rows, segs], bins[rows, segs + 1])

                def height(x, target=target):
                    return curve.points(x)[..., axis] - target

                roots = _bisect(height, tau[segs], tau[segs + 1])
                positions = curve.points(roots)[..., free]
                if free_period:
                    positions = free_lo + np.mod(positions - free_lo, free_period)
                for row in np.unique(rows):
                    found[start + row].append(positions[rows == row])
        return [np.sort(np.concatenate(f)) if f else np.empty(0) for f in found]

    @cached_property
    def _seed_column(self) -> np.ndarray:
        return self._axis_crossings(0, [self.origin[0]])[0]

    @cached_property
    def _seed_row(self) -> np.ndarray:
        return self._axis_crossings(1, [self.origin[1]])[0]

    def _parity_from_seed(self, axis: int, positions) -> np.ndarray:
        """Inside flags at the seed's column (axis=1) or row (axis=0) positions."""
        crossings = self._seed_column if axis == 1 else self._seed_row
        origin = self.origin[1] if axis == 1 else self.origin[0]
        passed = np.searchsorted(crossings, positions) - np.searchsorted(crossings, origin)
        return passed % 2 == 0

    def row_scan(self, level: float, axis: int = 1) -> RowScan:
        """Crossings and membership along the line x[axis] = level."""
        return self.row_scans([level], axis)[0]

    def row_scans(self, levels, axis: int = 1) -> list[RowScan]:
        levels = np.asarray(levels, dtype=float)
        lo = self.surface.bounds[axis][0]
        if period := self.surface.periods[axis]:
            levels = lo + np.mod(levels - lo, period)
        free = 1 - axis
        origin = float(self.origin[free])
        origin_inside = self._parity_from_seed(axis, levels)
        return [
            RowScan(
                axis=axis,
                level=float(level),
                crossings=crossings,
                origin=origin,
                origin_inside=bool(inside),
                span=self.surface.bounds[free],
            )
            for level, crossings, inside in zip(
                levels, self._axis_crossings(axis, levels), origin_inside, strict=True
            )
        ]

    def contains_many(self, points) -> np.ndarray:
        """Membership of many parameter points; no on-boundary check."""
        points = self.surface.wrap(np.asarray(points, dtype=float).reshape(-1, 2))
        inside = self.surface.in_bounds(points)
        if self.is_closed:
            return inside
        levels, rows = np.unique(points[:, 1], return_inverse=True)
        for row, scan in enumerate(self.row_scans(levels)):
            members = rows == row
            inside[members] &= scan.contains(points[members, 0])
        return inside

    def contains(self, p, settings: Settings | None = None) -> bool:
        """True iff p lies in the closed region D.

        Raises OnBoundary when p is within ``on_boundary_tol`` of a boundary curve.
        """
        settings = settings or get_settings()
        p = self.surface.wrap(np.asarray(p, dtype=float))
        if not self.surface.in_bounds(p):
            return False
        if self.is_closed:
            return True
        distance = self.distance_to_boundary(p)
        if distance < settings.on_boundary_tol:
            raise OnBoundary(p, distance)
        return bool(self.contains_many(p)[0])

    def distance_to_boundary(self, p, candidates: int = 4) -> float:
        """Parameter-space distance (minimal image) from p to the boundary."""
        tree, owners = self._sample_index
        if tree is None:
            return math.inf
        p = np.asarray(p, dtype=float)
        box_point, _ = self.surface.box_coordinates(p)
        k = min(candidates, len(owners))
        _, hits = tree.query(box_point[0], k=k)
        step = TWO_PI / self.samples
        best = math.inf
        for hit in np.atleast_1d(hits):
            curve_index, sample = owners[hit]
            curve = self.boundaries[curve_index]
            center = self.lifted[curve_index][0][sample]

            def gap(x, curve=curve):
                return float(np.linalg.norm(self.surface.difference(curve.points(x), p)))

            result = minimize_scalar(
                gap,
                bounds=(center - step, center + step),
                method="bounded",
                options={"xatol": 1e-13},
            )
            best = min(best, float(result.fun), gap(center))
        return best

    def crossing_parity(self, path) -> int:
        """Parity of boundary crossings along a polyline in the universal cover."""
        path = np.asarray(path, dtype=float)
        hits = 0
        for a, b in zip(path[:-1], path[1:], strict=True):
            lo = np.minimum(a, b)
            hi = np.maximum(a, b)
            for _, q in self.lifted:
                for offset in self._cover_offsets(q, lo, hi):
                    hits += _segment_hits(a, b, q + offset)
        return hits % 2

    def _cover_offsets(self, q: np.ndarray, lo: np.ndarray, hi: np.ndarray) -> list[np.ndarray]:
        ranges = []
        for axis, period in enumerate(self.surface.periods):
            if not period:
                ranges.append([0.0])
                continue
            first = math.floor((lo[axis] - q[:, axis].max()) / period)
            last = math.ceil((hi[axis] - q[:, axis].min()) / period)
            ranges.append([k * period for k in range(first, last + 1)])
        return [np.array([ds, dt]) for ds in ranges[0] for dt in ranges[1]]


@dataclass(frozen=True)
class Scene:
    name: str
    domain: Domain
    description: str = ""


# Validation


def _check_curve(surface: ParametricSurface, index: int, curve: BoundaryCurve, q, settings):
    if not np.all(surface.in_bounds(q)):
        raise SceneValidationError(
            "boundary leaves the parameter rectangle", f"curve {index}"
        )
    tau = TWO_PI * np.arange(len(q) - 1) / (len(q) - 1)
    try:
        frames = curve_frames(surface, curve, tau, settings)
    except DegenerateChart as exc:
        raise SceneValidationError("chart is degenerate on the boundary", f"curve {index}") from exc
    except SingularCurvePoint as exc:
        raise SceneValidationError("boundary curve is not regular", f"curve {index}") from exc
    slowest = float(np.min(frames.speed))
    if slowest <= settings.min_velocity:
        raise SceneValidationError(
            "boundary curve is not regular", f"curve {index} has speed {slowest:.3g}"
        )


def _check_simple(domain: Domain) -> None:
    """No curve crosses itself or another curve at sampling resolution."""
    surface = domain.surface
    starts, ends, owners = [], [], []
    for index, (_, q) in enumerate(domain.lifted):
        starts.append(q[:-1])
        ends.append(q[1:])
        owners.append(np.stack([np.full(len(q) - 1, index), np.arange(len(q) - 1)], axis=-1))
    if not starts:
        return
    a, b, owners = np.concatenate(starts), np.concatenate(ends), np.concatenate(owners)
    mid = 0.5 * (a + b)
    radius = float(np.max(np.linalg.norm(b - a, axis=-1)))
    pairs = surface.kdtree(mid).query_pairs(radius, output_type="ndarray")
    if not len(pairs):
        return
    i, j = pairs[:, 0], pairs[:, 1]
    same = owners[i, 0] == owners[j, 0]
    gap = np.abs(owners[i, 1] - owners[j, 1])
    adjacent = same & ((gap <= 1) | (gap == domain.samples - 1))
    i, j = i[~adjacent], j[~adjacent]
    # translate segment j next to segment i
    shift = surface.difference(mid[j], mid[i]) - (mid[j] - mid[i])
    p0, p1 = a[i], b[i]
    q0, q1 = a[j] + shift, b[j] + shift

    def cross(o, x, y):
        return (x[:, 0] - o[:, 0]) * (y[:, 1] - o[:, 1]) - (x[:, 1] - o[:, 1]) * (y[:, 0] - o[:, 0])

    hits = (np.signbit(cross(p0, p1, q0)) != np.signbit(cross(p0, p1, q1))) & (
        np.signbit(cross(q0, q1, p0)) != np.signbit(cross(q0, q1, p1))
    )
    if np.any(hits):
        k = int(np.argmax(hits))
        c0, c1 = int(owners[i[k], 0]), int(owners[j[k], 0])
        if c0 == c1:
            raise SceneValidationError("self-intersection", f"curve {c0}")
        raise SceneValidationError("boundaries intersect", f"curves {c0} and {c1}")


def _check_orientation(domain: Domain, settings: Settings) -> None:
    """p + eps*n must be inside and p - eps*n outside along every curve."""
    tau = TWO_PI * (np.arange(settings.orientation_samples) + 0.5) / settings.orientation_samples
    for index, curve in enumerate(domain.boundaries):
        frames = curve_frames(domain.surface, curve, tau, settings)
        q = curve.points(tau)
        jet = domain.surface.jet(q[:, 0], q[:, 1])
        step = pullback(fundamental_forms(jet, settings), jet, frames.n)
        step *= settings.orientation_eps / np.linalg.norm(step, axis=-1)[:, None]
        inner = domain.contains_many(q + step)
        outer = domain.contains_many(q - step)
        bad = ~inner | outer
        if np.any(bad):
            k = int(np.argmax(bad))
            raise SceneValidationError(
                "orientation check failed",
                f"curve {index} at tau={tau[k]:.4f}: inward normal does not point into D",
            )


def _check_compact(domain: Domain) -> None:
    """D stays away from the edges of bounded chart directions."""
    surface = domain.surface
    for axis, ((lo, hi), period) in enumerate(zip(surface.bounds, surface.periods, strict=True)):
        if period:
            continue
        free = 1 - axis
        f_lo, f_hi = surface.bounds[free]
        along = np.linspace(f_lo, f_hi, EDGE_SAMPLES)
        for edge in (lo, hi):
            points = np.empty((EDGE_SAMPLES, 2))
            points[:, axis] = edge
            points[:, free] = along
            if np.any(domain.contains_many(points)):
                raise SceneValidationError(
                    "domain reaches the edge of the chart", f"{'st'[axis]} = {edge:g}"
                )


def validate_domain(domain: Domain, settings: Settings | None = None) -> Domain:
    """Check every scene invariant; raise SceneValidationError on the first violation."""
    settings = settings or get_settings()
    surface = domain.surface
    seed = np.asarray(domain.seed, dtype=float)
    if not surface.in_bounds(seed):
        raise SceneValidationError("seed outside the parameter rectangle", str(domain.seed))
    for index, (curve, (_, q)) in enumerate(zip(domain.boundaries, domain.lifted, strict=True)):
        _check_curve(surface, index, curve, q, settings)
    _check_simple(domain)
    clearance = domain.distance_to_boundary(seed)
    if clearance <= settings.seed_clearance:
        raise SceneValidationError(
            "seed is not strictly inside", f"distance {clearance:.3g} to the boundary"
        )
    _check_compact(domain)
    _check_orientation(domain, settings)
    logger.debug("domain with %d boundary curves validated", len(domain.boundaries))
    return domain


# Scene files


def build_scene(spec: SceneFile, settings: Settings | None = None) -> Scene:
    """Turn a parsed scene file into a validated Scene."""
    settings = settings or get_settings()
    surface = build_surface(spec.surface)
    boundaries = tuple(BoundaryCurve.from_spec(b, surface.periods) for b in spec.boundaries)
    domain = Domain(
        surface=surface,
        boundaries=boundaries,
        seed=tuple(float(x) for x in spec.seed),
        reference_chi=spec.reference_chi,
        samples=settings.samples,
    )
    validate_domain(domain, settings)
    return Scene(name=spec.name, domain=domain, description=spec.description)


def load_scene(path: str | Path, settings: Settings | None = None) -> Scene:
    """Read, parse and validate a scene file."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError as exc:
        raise SceneNotFound(f"no scene file at {path}") from exc
    except OSError as exc:
        raise SceneParseError(f"cannot read {path}: {exc}") from exc
    try:
        spec = SceneFile.model_validate_json(text)
    except ValidationError as exc:
        raise SceneParseError(f"{path}: {exc}") from exc
    scene = build_scene(spec, settings)
    logger.info("loaded scene %r from %s", scene.name, path)
    return scene


def scene_to_file(scene: Scene) -> SceneFile:
    domain = scene.domain
    return SceneFile(
        name=scene.name,
        description=scene.description,
        surface=domain.surface.to_spec(),
        boundaries=[curve.to_spec() for curve in domain.boundaries],
        seed=domain.seed,
        reference_chi=domain.reference_chi,
    )


def dump_scene(scene: Scene, path: str | Path) -> Path:
    """Write ``scene`` in the format read by :func:`load_scene`."""
    path = Path(path)
    path.write_text(scene_to_file(scene).model_dump_json(indent=2) + "\n", encoding="utf-8")
    return path
