from fastapi import APIRouter

from sweepchi.services.catalog import scene_names

router = APIRouter(tags=["health"])


@router.get("/health")
async def health_check():
    """Liveness check; also reports how many catalog scenes are registered."""
    return {"status": "ok", "scenes": len(scene_names())}
