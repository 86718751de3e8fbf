"""FastAPI application exposing the sweepchi runs over HTTP."""

import logging

from fastapi import FastAPI
from fastapi.responses import RedirectResponse

from sweepchi.core.config import settings
from sweepchi.routers import api_router, health_router

logging.basicConfig(level=settings.log_level)

app = FastAPI(
    title=settings.app_name,
    description="Euler characteristic of surface domains from sweeping-plane tangencies",
    version="0.1.0",
)

app.include_router(health_router)
app.include_router(api_router)


@app.get("/")
async def root():
    """Redirect root to the scene catalog."""
    return RedirectResponse(url="/api/scenes")
