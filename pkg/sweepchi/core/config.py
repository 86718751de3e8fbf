from functools import lru_cache

from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Numerical tolerances and resolutions, overridable from the environment."""

    model_config = SettingsConfigDict(
        env_prefix="SWEEPCHI_",
        env_file=(".env", ".env.development"),
        env_file_encoding="utf-8",
        extra="ignore",
    )

    # Root finding
    grid: int = 256
    samples: int = 4096
    newton_max_iter: int = 50
    newton_tol: float = 1e-11
    dedup_radius: float = 1e-6

    # Genericity
    tol_k: float = 1e-8
    tol_kg: float = 1e-8
    tol_n: float = 1e-8
    flat_tol: float = 1e-10
    pole_tol: float = 1e-6
    max_retries: int = 8
    perturbation_angle: float = 1e-3

    # Geometry
    unit_tol: float = 1e-12
    chart_tol: float = 1e-12
    projection_tol: float = 1e-10
    integrality_tol: float = 1e-9

    # Scene validation
    on_boundary_tol: float = 1e-9
    seed_clearance: float = 1e-4
    orientation_eps: float = 1e-4
    orientation_samples: int = 64
    min_velocity: float = 1e-8

    # Oracles
    cell_resolution: int = 512
    quadrature_order: int = 32
    quadrature_panels: int = 32
    gauss_bonnet_tol: float = 1e-4

    # App
    app_name: str = "SweepChi"
    log_level: str = "WARNING"


@lru_cache
def get_settings() -> Settings:
    """Get cached settings instance."""
    return Settings()


settings = get_settings()
