from collections.abc import Callable
from typing import TypeVar

from fastapi import APIRouter, Depends, HTTPException, Query
from fastapi.concurrency import run_in_threadpool

from sweepchi.core.config import Settings, get_settings
from sweepchi.core.errors import (
    GenericityExhausted,
    NonIntegralResult,
    ResolutionTooCoarse,
    SceneNotFound,
    SceneValidationError,
    UnsupportedSurface,
)
from sweepchi.models.schemas import (
    CatalogEntry,
    CensusReport,
    ChiReport,
    RunConfig,
    ValidationReport,
)
from sweepchi.services import runner
from sweepchi.services.catalog import scene_names

router = APIRouter(prefix="/api", tags=["api"])

T = TypeVar("T")

MAX_DIRECTIONS = 1000


async def _run(fn: Callable[..., T], config: RunConfig, *args) -> T:
    """Run a CPU-bound runner off the event loop, mapping errors to HTTP statuses.

    Only catalog scenes are served; scene files stay a command line feature.
    """
    if config.scene not in scene_names():
        raise HTTPException(status_code=404, detail=f"unknown scene {config.scene!r}")
    try:
        return await run_in_threadpool(fn, config, *args)
    except SceneNotFound as exc:
        raise HTTPException(status_code=404, detail=str(exc)) from exc
    except (
        SceneValidationError,
        UnsupportedSurface,
        ResolutionTooCoarse,
        ValueError,
    ) as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from exc
    except GenericityExhausted as exc:
        raise HTTPException(status_code=409, detail=str(exc)) from exc
    except NonIntegralResult as exc:
        raise HTTPException(status_code=500, detail=str(exc)) from exc


@router.get("/scenes", response_model=list[CatalogEntry])
async def list_scenes(settings: Settings = Depends(get_settings)):
    """List the built-in scenes with their reference Euler characteristics."""
    return await run_in_threadpool(runner.list_catalog, settings)


@router.post("/chi", response_model=ChiReport)
async def compute_chi(config: RunConfig, settings: Settings = Depends(get_settings)):
    """Euler characteristic from the tangencies along one direction."""
    return await _run(runner.run_chi, config, settings)


@router.post("/census", response_model=CensusReport)
async def compute_census(config: RunConfig, settings: Settings = Depends(get_settings)):
    """Sweep timeline with island and bridge tallies."""
    return await _run(runner.run_census, config, settings)


@router.post("/validate", response_model=ValidationReport)
async def validate_scene(
    config: RunConfig,
    n: int = Query(20, ge=1, le=MAX_DIRECTIONS),
    settings: Settings = Depends(get_settings),
):
    """Agreement of sweep, census and special counts with both oracles over n directions."""
    return await _run(runner.run_validate, config, n, 1, settings)
