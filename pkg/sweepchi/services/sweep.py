"""Sweeping-plane tangencies and the tangency-count formula for chi(D).

For a direction u the planes <x, u> = lambda touch D at the critical points
of the height function h_u (interior events, signed by K) and at the points
where the boundary is tangent to a plane (boundary events, islands and
bridges signed by k_g - k_g^u). Sum the interior signs, add half the
boundary signs, and the total is chi(D).
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable, Iterable, Iterator
from dataclasses import dataclass, field
from typing import TypeVar

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components
from scipy.spatial.transform import Rotation

from sweepchi.core.config import Settings, get_settings
from sweepchi.core.errors import (
    DegenerateBoundaryTangency,
    DegenerateTangency,
    GenericityError,
    GenericityExhausted,
    InteriorCriticalOnBoundary,
    NonIntegralResult,
)
from sweepchi.models.records import GenericityReport, TangencyEvent
from sweepchi.models.schemas import EventKind
from sweepchi.services.curves import periodic_roots
from sweepchi.services.domain import Domain
from sweepchi.services.geometry import (
    as_direction,
    curve_frames,
    curve_jet,
    dot,
    fundamental_forms,
    orthonormal_frame,
    section_curve_curvature,
)
from sweepchi.services.surfaces import ParametricSurface

logger = logging.getLogger(__name__)

T = TypeVar("T")

POLISH_STEPS = 8


@dataclass(frozen=True)
class HeightField:
    """h(s, t) = <P(s, t), u> with its chart gradient and Hessian."""

    surface: ParametricSurface
    u: np.ndarray

    def value(self, st) -> np.ndarray:
        st = np.asarray(st, dtype=float)
        return dot(self.surface.evaluate(st[..., 0], st[..., 1]), self.u)

    def derivatives(self, st):
        st = np.asarray(st, dtype=float)
        jet = self.surface.jet(st[..., 0], st[..., 1])
        grad = np.stack([dot(jet.Ps, self.u), dot(jet.Pt, self.u)], axis=-1)
        hss, hst, htt = dot(jet.Pss, self.u), dot(jet.Pst, self.u), dot(jet.Ptt, self.u)
        hess = np.stack([np.stack([hss, hst], -1), np.stack([hst, htt], -1)], -2)
        return jet, grad, hess

    def newton(self, x: np.ndarray, steps: int, settings: Settings):
        """Run Newton on grad h = 0; return the final points and a converged mask."""
        surface = self.surface
        spans = [hi - lo for lo, hi in surface.bounds]
        max_step = 0.1 * min(spans)
        x = surface.wrap(np.array(x, dtype=float).reshape(-1, 2))
        converged = np.zeros(len(x), dtype=bool)
        alive = np.ones(len(x), dtype=bool)
        for _ in range(steps + 1):
            idx = np.nonzero(alive & ~converged)[0]
            if not idx.size:
                break
            jet, grad, hess = self.derivatives(x[idx])
            scale = np.linalg.norm(jet.Ps, axis=-1) + np.linalg.norm(jet.Pt, axis=-1)
            done = np.linalg.norm(grad, axis=-1) <= settings.newton_tol * scale
            converged[idx[done]] = True
            idx, grad, hess = idx[~done], grad[~done], hess[~done]
            if not idx.size:
                break
            delta = -np.einsum("nij,nj->ni", np.linalg.pinv(hess), grad)
            length = np.linalg.norm(delta, axis=-1)
            shrink = np.minimum(1.0, max_step / np.maximum(length, 1e-300))
            x[idx] = surface.wrap(x[idx] + delta * shrink[:, None])
            # Newton stalls on flat Hessians and may leave a bounded chart; drop those seeds
            alive[idx] &= (length > 0) & surface.in_bounds(x[idx])
        return x, converged & alive

    def seeds(self, grid: int) -> np.ndarray:
        """Centers of grid cells where both gradient components may vanish."""
        (s0, s1), (t0, t1) = self.surface.bounds
        s = np.linspace(s0, s1, grid + 1)
        t = np.linspace(t0, t1, grid + 1)
        ss, tt = np.meshgrid(s, t, indexing="ij")
        _, grad, _ = self.derivatives(np.stack([ss, tt], axis=-1))
        marked = np.ones((grid, grid), dtype=bool)
        for c in range(2):
            g = grad[..., c]
            corners = np.stack([g[:-1, :-1], g[1:, :-1], g[:-1, 1:], g[1:, 1:]])
            marked &= (corners.min(axis=0) <= 0) & (corners.max(axis=0) >= 0)
        # grow by one cell so a zero curve grazing a cell edge is not missed
        grown = marked.copy()
        for axis, wrap in enumerate(self.surface.wraps):
            for shift in (1, -1):
                if wrap:
                    grown |= np.roll(marked, shift, axis=axis)
                else:
                    padded = np.pad(marked, [(1, 1) if a == axis else (0, 0) for a in range(2)])
                    grown |= np.take(padded, np.arange(grid) + 1 - shift, axis=axis)
        i, j = np.nonzero(grown)
        return np.stack([0.5 * (s[i] + s[i + 1]), 0.5 * (t[j] + t[j + 1])], axis=-1)

    def critical_points(self, settings: Settings) -> np.ndarray:
        """All isolated critical points of h over the parameter rectangle."""
        seeds = self.seeds(settings.grid)
        if not len(seeds):
            return np.empty((0, 2))
        x, ok = self.newton(seeds, settings.newton_max_iter, settings)
        logger.debug("newton: %d of %d seeds converged", int(ok.sum()), len(seeds))
        roots = x[ok]
        if not len(roots):
            return roots
        roots = self._deduplicate(roots, settings.dedup_radius)
        polished, ok = self.newton(roots, POLISH_STEPS, settings)
        return polished[ok]

    def _deduplicate(self, roots: np.ndarray, radius: float) -> np.ndarray:
        """Replace each cluster of roots within ``radius`` by its centroid."""
        surface = self.surface
        pairs = surface.kdtree(roots).query_pairs(radius, output_type="ndarray")
        n = len(roots)
        graph = coo_matrix((np.ones(len(pairs)), (pairs[:, 0], pairs[:, 1])), shape=(n, n))
        count, labels = connected_components(graph, directed=False)
        _, first = np.unique(labels, return_index=True)
        anchors = roots[first]
        offsets = surface.difference(roots, anchors[labels])
        sizes = np.bincount(labels, minlength=count)
        mean = np.stack(
            [np.bincount(labels, weights=offsets[:, c], minlength=count) / sizes for c in range(2)],
            axis=-1,
        )
        return surface.wrap(anchors + mean)


def interior_tangencies(
    domain: Domain, u, settings: Settings | None = None
) -> list[TangencyEvent]:
    """Critical points of h_u in D, each signed by its Gauss curvature."""
    settings = settings or get_settings()
    u = as_direction(u, settings)
    height = HeightField(domain.surface, u)
    roots = height.critical_points(settings)
    if len(roots):
        roots = roots[domain.contains_many(roots)]
    if not len(roots):
        return []
    jet, _, hess = height.derivatives(roots)
    K = fundamental_forms(jet, settings).K
    det = np.linalg.det(hess)
    flat = np.abs(K) < settings.tol_k
    if np.any(flat):
        k = int(np.argmax(flat))
        raise DegenerateTangency(f"K = {K[k]:.3g} at critical point {tuple(roots[k])}")
    incoherent = np.sign(det) != np.sign(K)
    if np.any(incoherent):
        k = int(np.argmax(incoherent))
        raise DegenerateTangency(
            f"Hessian determinant {det[k]:.3g} disagrees with K = {K[k]:.3g} at {tuple(roots[k])}"
        )
    if domain.boundaries:
        for root in roots:
            gap = domain.distance_to_boundary(root)
            if gap < settings.on_boundary_tol:
                raise InteriorCriticalOnBoundary(
                    f"critical point {tuple(root)} lies {gap:.3g} from the boundary"
                )
    return [
        TangencyEvent(
            kind=EventKind.INTERIOR,
            level=float(dot(jet.P[k], u)),
            param=(float(roots[k, 0]), float(roots[k, 1])),
            point=tuple(float(v) for v in jet.P[k]),
            index=1 if K[k] > 0 else -1,
            gauss_curvature=float(K[k]),
            hessian_det=float(det[k]),
        )
        for k in range(len(roots))
    ]


def curve_roots(
    domain: Domain,
    index: int,
    f: Callable[[np.ndarray], np.ndarray],
    settings: Settings,
    what: str = "height",
) -> np.ndarray:
    """Zeros of a periodic function along boundary curve ``index``.

    ``f`` must scale like the curve's speed, which sets the flatness threshold.
    """
    curve = domain.boundaries[index]
    tau = domain.lifted[index][0]
    speed = np.linalg.norm(curve_jet(domain.surface, curve, tau).velocity, axis=-1)
    roots = periodic_roots(f, settings.samples, float(np.max(speed)), settings.flat_tol)
    if roots is None:
        raise DegenerateBoundaryTangency(f"{what} is constant along boundary curve {index}")
    if len(roots) % 2:
        raise DegenerateBoundaryTangency(
            f"odd number ({len(roots)}) of {what} tangencies on boundary curve {index}"
        )
    return roots


def height_critical_parameters(
    domain: Domain, index: int, u: np.ndarray, settings: Settings
) -> np.ndarray:
    """Curve parameters where <alpha', u> vanishes on boundary curve ``index``."""
    surface, curve = domain.surface, domain.boundaries[index]

    def slope(tau):
        return dot(curve_jet(surface, curve, tau).velocity, u)

    return curve_roots(domain, index, slope, settings)


def boundary_tangencies(
    domain: Domain, u, settings: Settings | None = None
) -> list[TangencyEvent]:
    """Points where a boundary curve is tangent to a sweeping plane.

    Islands (k_g > k_g^u) count +1, bridges -1.
    """
    settings = settings or get_settings()
    u = as_direction(u, settings)
    surface = domain.surface
    events = []
    for index, curve in enumerate(domain.boundaries):
        roots = height_critical_parameters(domain, index, u, settings)
        if not len(roots):
            continue
        frames = curve_frames(surface, curve, roots, settings)
        cj = curve_jet(surface, curve, roots)
        geom = fundamental_forms(cj.surface, settings)
        alignment = dot(geom.N, u)
        if np.any(np.abs(alignment) > 1.0 - settings.tol_n):
            raise InteriorCriticalOnBoundary(
                f"u is normal to the surface at a tangency of boundary curve {index}"
            )
        section = section_curve_curvature(geom, frames, u, settings)
        gap = frames.k_g - section
        normal_alignment = dot(frames.n, u)
        accel = dot(cj.acceleration, u) / frames.speed**2
        for k, tau in enumerate(roots):
            if abs(gap[k]) < settings.tol_kg:
                raise DegenerateBoundaryTangency(
                    f"k_g - k_g^u = {gap[k]:.3g} on curve {index} at tau={tau:.6f}"
                )
            if np.sign(gap[k]) != np.sign(accel[k]) * np.sign(normal_alignment[k]):
                raise DegenerateBoundaryTangency(
                    f"island/bridge sign is not coherent on curve {index} at tau={tau:.6f}"
                )
            param = surface.wrap(cj.q[k])
            events.append(
                TangencyEvent(
                    kind=EventKind.BOUNDARY,
                    level=float(dot(frames.y[k], u)),
                    param=(float(param[0]), float(param[1])),
                    point=tuple(float(v) for v in frames.y[k]),
                    index=1 if gap[k] > 0 else -1,
                    curve=index,
                    tau=float(tau),
                    geodesic_curvature=float(frames.k_g[k]),
                    section_curvature=float(section[k]),
                    height_acceleration=float(accel[k]),
                    normal_alignment=float(normal_alignment[k]),
                )
            )
    return events


# Genericity


def perturbed_directions(
    u, rng: np.random.Generator, settings: Settings | None = None
) -> Iterator[tuple[int, np.ndarray]]:
    """Attempt 0 is u itself; attempt k rotates u by perturbation_angle * 2**k
    about a random axis perpendicular to u."""
    settings = settings or get_settings()
    u = as_direction(u, settings)
    e1, e2 = orthonormal_frame(u)
    yield 0, u
    for attempt in range(1, settings.max_retries + 1):
        phi = rng.uniform(0.0, 2.0 * math.pi)
        axis = math.cos(phi) * e1 + math.sin(phi) * e2
        angle = settings.perturbation_angle * 2.0**attempt
        rotated = Rotation.from_rotvec(angle * axis).apply(u)
        yield attempt, rotated / np.linalg.norm(rotated)


def retry_generic(
    fn: Callable[[np.ndarray], T],
    u,
    rng: np.random.Generator | None = None,
    settings: Settings | None = None,
) -> tuple[T, GenericityReport]:
    """Call ``fn`` on u, perturbing u while ``fn`` raises a GenericityError."""
    settings = settings or get_settings()
    rng = rng if rng is not None else np.random.default_rng(0)
    reasons: list[str] = []
    direction = as_direction(u, settings)
    for attempt, direction in perturbed_directions(u, rng, settings):
        try:
            result = fn(direction)
        except GenericityError as exc:
            reasons.append(f"attempt {attempt}: {type(exc).__name__}: {exc}")
            logger.debug("direction %s rejected: %s", direction, exc)
            continue
        if attempt:
            logger.info("accepted direction %s after %d retries", direction, attempt)
        return result, GenericityReport(direction=direction, retries=attempt, reasons=reasons)
    raise GenericityExhausted(
        GenericityReport(direction=direction, retries=settings.max_retries, reasons=reasons)
    )


def ensure_generic(
    domain: Domain,
    u,
    rng: np.random.Generator | None = None,
    settings: Settings | None = None,
) -> tuple[np.ndarray, GenericityReport]:
    """A direction near u for which every tangency is non-degenerate."""
    settings = settings or get_settings()

    def detect(direction):
        interior_tangencies(domain, direction, settings)
        boundary_tangencies(domain, direction, settings)

    _, report = retry_generic(detect, u, rng, settings)
    return report.direction, report


# The formula


@dataclass
class SweepResult:
    direction: np.ndarray
    interior: list[TangencyEvent]
    boundary: list[TangencyEvent]
    report: GenericityReport
    value: float = field(init=False)

    def __post_init__(self):
        self.value = morse_count(self.interior, self.boundary)

    @property
    def events(self) -> list[TangencyEvent]:
        return order_events([*self.interior, *self.boundary])

    def chi(self, settings: Settings | None = None) -> int:
        settings = settings or get_settings()
        return integral_value(self.value, settings.integrality_tol)


def sweep(
    domain: Domain,
    u,
    rng: np.random.Generator | None = None,
    settings: Settings | None = None,
) -> SweepResult:
    """All tangencies for the first generic direction near u."""
    settings = settings or get_settings()

    def tangencies(direction):
        return (
            interior_tangencies(domain, direction, settings),
            boundary_tangencies(domain, direction, settings),
        )

    (interior, boundary), report = retry_generic(tangencies, u, rng, settings)
    return SweepResult(report.direction, interior, boundary, report)


def euler_characteristic(
    domain: Domain,
    u,
    rng: np.random.Generator | None = None,
    settings: Settings | None = None,
) -> tuple[int, list[TangencyEvent], GenericityReport]:
    """chi(D) = sum of sign K over interior events + half the island/bridge signs."""
    settings = settings or get_settings()
    result = sweep(domain, u, rng, settings)
    return result.chi(settings), result.events, result.report


def _index(item: int | TangencyEvent) -> int:
    return item.index if isinstance(item, TangencyEvent) else int(item)


def morse_count(
    interior: Iterable[int | TangencyEvent], boundary: Iterable[int | TangencyEvent]
) -> float:
    """Sum of interior indices plus half the sum of boundary indices."""
    return float(sum(_index(e) for e in interior)) + 0.5 * sum(_index(e) for e in boundary)


def integral_value(value: float, tol: float = 1e-9) -> int:
    """The integer ``value`` stands for; never rounds a genuinely fractional count."""
    nearest = round(value)
    if abs(value - nearest) > tol:
        raise NonIntegralResult(value)
    return int(nearest)


def order_events(events: Iterable[TangencyEvent], tie: float = 1e-12) -> list[TangencyEvent]:
    """Sweep order by level; levels within ``tie`` are ordered interior first, then by location."""
    ordered = sorted(events, key=TangencyEvent.sort_key)
    result: list[TangencyEvent] = []
    group: list[TangencyEvent] = []
    for event in ordered:
        if group and event.level - group[0].level > tie:
            result.extend(sorted(group, key=lambda e: e.sort_key()[1:]))
            group = []
        group.append(event)
    result.extend(sorted(group, key=lambda e: e.sort_key()[1:]))
    return result
