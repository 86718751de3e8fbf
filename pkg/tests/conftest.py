"""Test fixtures and configuration."""

from collections.abc import AsyncGenerator

import numpy as np
import pytest
import pytest_asyncio
from httpx import ASGITransport, AsyncClient

from sweepchi.core.config import Settings, get_settings
from sweepchi.main import app
from sweepchi.services.catalog import get_scene


@pytest_asyncio.fixture
async def client() -> AsyncGenerator[AsyncClient, None]:
    """Create a test client for the HTTP API."""
    async with AsyncClient(
        transport=ASGITransport(app=app),
        base_url="http://test",
    ) as ac:
        yield ac


@pytest.fixture
def settings() -> Settings:
    """Default settings."""
    return get_settings()


@pytest.fixture
def coarse_settings() -> Settings:
    """Cheaper resolutions for tests that run many sweeps."""
    return get_settings().model_copy(
        update={"grid": 128, "samples": 2048, "cell_resolution": 256}
    )


@pytest.fixture
def rng() -> np.random.Generator:
    """Seeded generator."""
    return np.random.default_rng(1234)


@pytest.fixture
def scene(settings):
    """Factory for validated catalog scenes."""

    def build(name: str, scene_settings: Settings | None = None):
        return get_scene(name, scene_settings or settings)

    return build
