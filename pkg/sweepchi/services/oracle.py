"""Independent ground truth for chi(D).

Three checks that share nothing with the tangency search beyond the domain
itself: V - E + F of a grid cell complex in the parameter rectangle, the
Gauss-Bonnet integral, and the island/bridge census of a sweep.
"""

from __future__ import annotations

import logging
import math

import numpy as np
from numpy.polynomial.legendre import leggauss

from sweepchi.core.config import Settings, get_settings
from sweepchi.core.errors import ResolutionTooCoarse
from sweepchi.models.records import CellComplexStats, SweepCensus
from sweepchi.models.schemas import Classification
from sweepchi.services.curves import TWO_PI, periodic_roots
from sweepchi.services.domain import Domain
from sweepchi.services.geometry import curve_frames, surface_geometry
from sweepchi.services.sweep import SweepResult, sweep

logger = logging.getLogger(__name__)

MIN_RESOLUTION = 16
# rows of the area integral evaluated per batch
ROW_CHUNK = 64


# Cell complex


def _touching(mask: np.ndarray, axis: int, wraps: bool) -> np.ndarray:
    """Along ``axis``, flag each grid line that bounds a flagged cell."""
    if wraps:
        return mask | np.roll(mask, 1, axis=axis)
    pad = [(0, 0), (0, 0)]
    pad[axis] = (1, 1)
    padded = np.pad(mask, pad)
    lower = np.take(padded, np.arange(mask.shape[axis] + 1), axis=axis)
    upper = np.take(padded, np.arange(1, mask.shape[axis] + 2), axis=axis)
    return lower | upper


def _check_resolution(domain: Domain, cell: float) -> None:
    reach = 3.0 * cell
    for index, (_, q) in enumerate(domain.lifted):
        if max(np.ptp(q[:, 0]), np.ptp(q[:, 1])) < reach:
            raise ResolutionTooCoarse(f"curve {index} spans fewer than three grid cells")
    points = np.concatenate([q[:-1] for _, q in domain.lifted])
    owners = np.concatenate([np.full(len(q) - 1, i) for i, (_, q) in enumerate(domain.lifted)])
    # arc length along each lifted curve, to tell neighbours from self-approaches
    arcs = []
    for _, q in domain.lifted:
        steps = np.linalg.norm(np.diff(q, axis=0), axis=-1)
        arcs.append((np.concatenate([[0.0], np.cumsum(steps)[:-1]]), float(steps.sum())))
    along = np.concatenate([arc for arc, _ in arcs])
    totals = np.array([total for _, total in arcs])
    pairs = domain.surface.kdtree(points).query_pairs(reach, output_type="ndarray")
    if not len(pairs):
        return
    i, j = pairs[:, 0], pairs[:, 1]
    other = owners[i] != owners[j]
    gap = np.abs(along[i] - along[j])
    gap = np.minimum(gap, totals[owners[i]] - gap)
    close = other | (gap > 4.0 * reach)
    if np.any(close):
        k = int(np.argmax(close))
        raise ResolutionTooCoarse(
            f"boundary curves {owners[i[k]]} and {owners[j[k]]} come within three cells "
            f"near {tuple(np.round(points[i[k]], 6))}"
        )


def chi_cell_complex(
    domain: Domain, resolution: int | None = None, settings: Settings | None = None
) -> CellComplexStats:
    """V - E + F of the closed cells of an R x R parameter grid whose centers lie in D.

    Grid lines of periodic axes are identified across the wrap.
    """
    settings = settings or get_settings()
    resolution = resolution or settings.cell_resolution
    if resolution < MIN_RESOLUTION:
        raise ValueError(f"resolution must be at least {MIN_RESOLUTION}")
    (s_lo, s_hi), (t_lo, t_hi) = domain.surface.bounds
    wrap_s, wrap_t = domain.surface.wraps
    hs, ht = (s_hi - s_lo) / resolution, (t_hi - t_lo) / resolution
    if domain.boundaries:
        _check_resolution(domain, max(hs, ht))
    s = s_lo + (np.arange(resolution) + 0.5) * hs
    t = t_lo + (np.arange(resolution) + 0.5) * ht
    # rows are t, columns are s
    if domain.is_closed:
        faces = np.ones((resolution, resolution), dtype=bool)
    else:
        faces = np.stack([scan.contains(s) for scan in domain.row_scans(t, axis=1)])
    vertices = _touching(_touching(faces, 0, wrap_t), 1, wrap_s)
    edges_s = _touching(faces, 0, wrap_t)
    edges_t = _touching(faces, 1, wrap_s)
    stats = CellComplexStats(
        vertices=int(vertices.sum()),
        edges=int(edges_s.sum() + edges_t.sum()),
        faces=int(faces.sum()),
        resolution=resolution,
    )
    logger.debug(
        "cell complex R=%d: V=%d E=%d F=%d", resolution, stats.vertices, stats.edges, stats.faces
    )
    return stats


# Gauss-Bonnet


def _composite_rule(a: float, b: float, panels: int, order: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = leggauss(order)
    edges = np.linspace(a, b, panels + 1)
    half = 0.5 * np.diff(edges)
    mids = 0.5 * (edges[:-1] + edges[1:])
    return (mids[:, None] + half[:, None] * x).ravel(), (half[:, None] * w).ravel()


def _smoothed_rule(a: float, b: float, panels: int, order: int) -> tuple[np.ndarray, np.ndarray]:
    """Composite rule under t = a + (b - a)(3x^2 - 2x^3), flat at both ends.

    The row integral has square-root kinks where the boundary turns in t;
    the substitution makes those endpoints smooth.
    """
    x, w = _composite_rule(0.0, 1.0, panels, order)
    return a + (b - a) * x * x * (3.0 - 2.0 * x), w * (b - a) * 6.0 * x * (1.0 - x)


def _row_breakpoints(domain: Domain, settings: Settings) -> np.ndarray:
    """Values of t where some boundary curve has a horizontal tangent."""
    found = []
    for curve in domain.boundaries:

        def slope(tau, curve=curve):
            return curve.jet(tau)[1][..., 1]

        roots = periodic_roots(slope, domain.samples, flat_tol=settings.flat_tol)
        if roots is None:
            # a loop at constant t
            found.append(curve.points(np.zeros(1))[:, 1])
        elif len(roots):
            found.append(curve.points(roots)[:, 1])
    if not found:
        return np.empty(0)
    return np.concatenate(found)


def _row_segments(domain: Domain, settings: Settings) -> list[tuple[float, float]]:
    (t_lo, t_hi) = domain.surface.bounds[1]
    breaks = _row_breakpoints(domain, settings)
    if period := domain.surface.periods[1]:
        breaks = np.concatenate([t_lo + np.mod(breaks - t_lo, period), [t_lo, t_lo + period]])
    elif not len(breaks):
        breaks = np.array([t_lo, t_hi])
    breaks = np.unique(breaks)
    keep = np.concatenate([[True], np.diff(breaks) > settings.unit_tol])
    breaks = breaks[keep]
    return list(zip(breaks[:-1].tolist(), breaks[1:].tolist(), strict=True))


def _area_integral(domain: Domain, order: int, settings: Settings) -> float:
    panels = settings.quadrature_panels
    (s_lo, s_hi), (t_lo, t_hi) = domain.surface.bounds
    t_span = t_hi - t_lo
    s_span = s_hi - s_lo
    rows, row_weights = [], []
    for a, b in _row_segments(domain, settings):
        count = max(1, math.ceil(panels * (b - a) / t_span))
        t, w = _smoothed_rule(a, b, count, order)
        rows.append(t)
        row_weights.append(w)
    if not rows:
        return 0.0
    rows = np.concatenate(rows)
    row_weights = np.concatenate(row_weights)
    total = 0.0
    for start in range(0, len(rows), ROW_CHUNK):
        chunk = rows[start : start + ROW_CHUNK]
        points, weights = [], []
        for t, wt, scan in zip(
            chunk, row_weights[start : start + ROW_CHUNK], domain.row_scans(chunk), strict=True
        ):
            for x0, x1 in scan.intervals():
                count = max(1, math.ceil(panels * (x1 - x0) / s_span))
                s, ws = _composite_rule(x0, x1, count, order)
                points.append(np.stack([s, np.full_like(s, t)], axis=-1))
                weights.append(ws * wt)
        if not points:
            continue
        geometry = surface_geometry(domain.surface, np.concatenate(points), settings)
        total += float(np.sum(geometry.K * geometry.area_element * np.concatenate(weights)))
    return total


def _boundary_integral(domain: Domain, order: int, settings: Settings) -> float:
    total = 0.0
    for curve in domain.boundaries:
        tau, w = _composite_rule(0.0, TWO_PI, settings.quadrature_panels, order)
        frames = curve_frames(domain.surface, curve, tau, settings)
        total += float(np.sum(frames.k_g * frames.speed * w))
    return total


def chi_gauss_bonnet(
    domain: Domain, order: int | None = None, settings: Settings | None = None
) -> float:
    """(integral of K dA over D + integral of k_g ds over the boundary) / 2 pi.

    Not rounded; the distance to the nearest integer is the residual.
    """
    settings = settings or get_settings()
    order = order or settings.quadrature_order
    area = _area_integral(domain, order, settings)
    boundary = _boundary_integral(domain, order, settings)
    value = (area + boundary) / TWO_PI
    logger.debug(
        "Gauss-Bonnet: area %.12g boundary %.12g chi %.12g", area, boundary, value
    )
    return value


# Census


def census_from_result(result: SweepResult) -> SweepCensus:
    """Extremes, saddles, islands and bridges of an existing sweep."""
    events = result.events
    tally = {c: 0 for c in Classification}
    for event in events:
        tally[event.classification] += 1
    return SweepCensus(
        i2=tally[Classification.EXTREME],
        b2=tally[Classification.SADDLE],
        i1=tally[Classification.ISLAND],
        b1=tally[Classification.BRIDGE],
        events=tuple(events),
        direction=result.direction,
        report=result.report,
    )


def sweep_census(
    domain: Domain,
    u,
    rng: np.random.Generator | None = None,
    settings: Settings | None = None,
) -> SweepCensus:
    """chi(D) = (I2 - B2) + (I1 - B1) / 2 over the sweep events in level order."""
    return census_from_result(sweep(domain, u, rng, settings))
