"""Runs shared by the command line and the HTTP API.

Each run takes a RunConfig and returns one of the report models; errors from
the geometric services propagate unchanged for the caller to map.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from sweepchi.core.config import Settings, get_settings
from sweepchi.core.errors import GenericityExhausted, NonIntegralResult, UnsupportedSurface
from sweepchi.models.records import GenericityReport, TangencyEvent
from sweepchi.models.schemas import (
    CatalogEntry,
    CensusReport,
    ChiReport,
    DirectionResult,
    EventRecord,
    GenericityRecord,
    Method,
    RunConfig,
    ValidationReport,
)
from sweepchi.services.catalog import catalog, get_scene, scene_names
from sweepchi.services.domain import Domain, Scene, load_scene
from sweepchi.services.geometry import as_direction, random_direction
from sweepchi.services.oracle import census_from_result, chi_cell_complex, chi_gauss_bonnet
from sweepchi.services.special import special_sweep
from sweepchi.services.sweep import SweepResult, sweep

logger = logging.getLogger(__name__)


def run_settings(config: RunConfig, base: Settings | None = None) -> Settings:
    """Settings with the run's overrides applied."""
    base = base or get_settings()
    overrides = config.overrides()
    return base.model_copy(update=overrides) if overrides else base


def resolve_scene(reference: str, settings: Settings | None = None) -> Scene:
    """A catalog scene by name, otherwise a scene file by path."""
    settings = settings or get_settings()
    if reference in scene_names():
        return get_scene(reference, settings)
    return load_scene(reference, settings)


def requested_direction(
    config: RunConfig, method: Method, rng: np.random.Generator, settings: Settings
) -> np.ndarray:
    if config.direction != "random":
        return as_direction(config.direction, settings)
    if method is Method.PLANAR:
        angle = rng.uniform(0.0, 2.0 * math.pi)
        return np.array([math.cos(angle), math.sin(angle), 0.0])
    return random_direction(rng)


def run_sweep(
    method: Method,
    domain: Domain,
    u,
    rng: np.random.Generator,
    settings: Settings,
) -> SweepResult:
    if method is Method.SWEEP:
        return sweep(domain, u, rng, settings)
    return special_sweep(method, domain, u, rng, settings)


def event_records(events: list[TangencyEvent]) -> list[EventRecord]:
    """Events in sweep order with the partial tangency sum after each one."""
    records = []
    running = 0.0
    for event in events:
        running += event.contribution
        records.append(
            EventRecord(
                kind=event.kind,
                classification=event.classification,
                level=event.level,
                s=event.param[0],
                t=event.param[1],
                curve=event.curve,
                tau=event.tau,
                location=list(event.point),
                quantity=event.quantity,
                index=event.index,
                running_chi=running,
            )
        )
    return records


def genericity_record(report: GenericityReport) -> GenericityRecord:
    return GenericityRecord(
        direction=[float(x) for x in report.direction],
        retries=report.retries,
        reasons=list(report.reasons),
    )


def run_chi(config: RunConfig, settings: Settings | None = None) -> ChiReport:
    settings = run_settings(config, settings)
    scene = resolve_scene(config.scene, settings)
    rng = np.random.default_rng(config.seed)
    u = requested_direction(config, config.method, rng, settings)
    result = run_sweep(config.method, scene.domain, u, rng, settings)
    chi = result.chi(settings)
    logger.info(
        "%s: chi=%d by %s along %s after %d retries",
        scene.name,
        chi,
        config.method.value,
        np.round(result.direction, 12).tolist(),
        result.report.retries,
    )
    return ChiReport(
        scene=scene.name,
        method=config.method,
        chi=chi,
        reference_chi=scene.domain.reference_chi,
        direction=[float(x) for x in result.direction],
        events=event_records(result.events),
        genericity=genericity_record(result.report),
    )


def run_census(config: RunConfig, settings: Settings | None = None) -> CensusReport:
    settings = run_settings(config, settings)
    scene = resolve_scene(config.scene, settings)
    rng = np.random.default_rng(config.seed)
    u = requested_direction(config, Method.SWEEP, rng, settings)
    census = census_from_result(sweep(scene.domain, u, rng, settings))
    return CensusReport(
        scene=scene.name,
        direction=[float(x) for x in census.direction],
        i2=census.i2,
        b2=census.b2,
        i1=census.i1,
        b1=census.b1,
        chi=census.chi,
        events=event_records(list(census.events)),
        genericity=genericity_record(census.report),
    )


def special_methods(domain: Domain) -> list[Method]:
    """The specialized counts that apply to ``domain``'s surface."""
    if domain.surface.is_plane:
        return [Method.PLANAR]
    if domain.surface.is_unit_sphere:
        return [Method.PARALLELS, Method.MERIDIANS]
    return []


def _check_direction(
    index: int, domain: Domain, seed: int, expected: int, settings: Settings
) -> DirectionResult:
    rng = np.random.default_rng([seed, index])
    u = random_direction(rng)
    row = DirectionResult(index=index, requested=[float(x) for x in u])
    try:
        result = sweep(domain, u, rng, settings)
        row.accepted = [float(x) for x in result.direction]
        row.retries = result.report.retries
        row.sweep = result.chi(settings)
        row.census = census_from_result(result).chi
        for method in special_methods(domain):
            special = special_sweep(method, domain, result.direction, rng, settings)
            row.special[method.value] = special.chi(settings)
    except (GenericityExhausted, NonIntegralResult, UnsupportedSurface) as exc:
        row.error = f"{type(exc).__name__}: {exc}"
        return row
    values = [row.sweep, row.census, *row.special.values()]
    row.agrees = all(value == expected for value in values)
    if not row.agrees:
        logger.warning("direction %d disagrees: %s", index, row.model_dump_json())
    return row


def run_validate(
    config: RunConfig, n: int, workers: int = 1, settings: Settings | None = None
) -> ValidationReport:
    """Sweep, census and special counts over n seeded directions against both oracles.

    The direction of each index comes from its own generator, so the report
    does not depend on ``workers``.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    settings = run_settings(config, settings)
    scene = resolve_scene(config.scene, settings)
    domain = scene.domain
    cells = chi_cell_complex(domain, settings.cell_resolution, settings)
    integral = chi_gauss_bonnet(domain, settings.quadrature_order, settings)
    residual = abs(integral - round(integral))
    expected = cells.chi
    oracles_agree = round(integral) == expected and residual < settings.gauss_bonnet_tol
    if domain.reference_chi is not None:
        oracles_agree = oracles_agree and domain.reference_chi == expected
    logger.info(
        "%s: cell complex chi=%d, Gauss-Bonnet %.12g (residual %.3g)",
        scene.name,
        expected,
        integral,
        residual,
    )

    def check(index: int) -> DirectionResult:
        return _check_direction(index, domain, config.seed, expected, settings)

    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        rows = list(pool.map(check, range(n)))
    retries = [row.retries for row in rows]
    return ValidationReport(
        scene=scene.name,
        reference_chi=domain.reference_chi,
        cell_complex=expected,
        cell_resolution=cells.resolution,
        gauss_bonnet=integral,
        gauss_bonnet_residual=residual,
        directions=rows,
        max_retries_used=max(retries),
        mean_retries=float(np.mean(retries)),
        all_agree=oracles_agree and all(row.agrees for row in rows),
    )


def list_catalog(settings: Settings | None = None) -> list[CatalogEntry]:
    return [
        CatalogEntry(
            name=scene.name,
            surface=scene.domain.surface.to_spec().kind,
            reference_chi=scene.domain.reference_chi,
            description=scene.description,
        )
        for scene in catalog(settings)
    ]
