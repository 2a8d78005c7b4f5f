"""Application configuration module using Pydantic settings."""

import os
from functools import lru_cache
from typing import List, Literal, Tuple

from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


def _default_threads() -> int:
    return max(1, min(os.cpu_count() or 1, 8))


class Settings(BaseSettings):
    """Runtime settings loaded from ``OVERLAPIX_*`` environment variables."""

    model_config = SettingsConfigDict(
        env_prefix="OVERLAPIX_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
    )

    # Application Configuration
    app_name: str = Field(default="overlapix", description="Application name")
    app_env: Literal["development", "staging", "production"] = Field(
        default="development", description="Application environment"
    )
    debug: bool = Field(default=False, description="Debug mode")
    log_level: Literal["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"] = Field(
        default="WARNING", description="Logging level"
    )
    log_format: Literal["console", "json"] = Field(
        default="console", description="Log renderer"
    )

    # Worker Configuration
    threads: int = Field(
        default_factory=_default_threads,
        description="Maximum number of trial workers",
    )

    # Quadrature Configuration
    quad_rel_tol: float = Field(
        default=1e-9, description="Relative L1 change that stops node doubling"
    )
    quad_initial_nodes: int = Field(default=8, description="Gauss-Legendre nodes per panel before doubling")
    quad_max_doublings: int = Field(default=8, description="Maximum number of node doublings")
    tail_mass_tol: float = Field(
        default=1e-6, description="Largest tolerated squared mass outside the quadrature radius"
    )
    cluster_x_nodes: int = Field(default=64, description="Position nodes per spike cluster")
    cluster_panel_nodes: int = Field(default=6, description="Momentum nodes per half-period panel")

    # Sampling / Estimation Configuration
    cdf_knots: int = Field(default=4096, description="Knots of the radial inverse CDF table")
    clamp_window: float = Field(
        default=1e-9, description="Excess of |g| over r that is clamped instead of rejected"
    )
    max_samples: int = Field(default=2**31, description="Largest admissible sample budget")
    eps_prime_fractions: Tuple[float, ...] = Field(
        default=(0.0, 0.125, 0.25, 0.375, 0.5, 0.625, 0.75),
        description="Fractions of epsilon tried for the smoothing parameter",
    )
    failure_slack: float = Field(
        default=3.0, description="Multiplier c in the failure-rate slack c*sqrt(delta/T)"
    )
    bisection_max_iter: int = Field(default=60, description="Threshold bisection iterations")
    bisection_rel_tol: float = Field(default=1e-6, description="Threshold bisection tolerance")

    # Output Configuration
    float_digits: int = Field(default=12, description="Significant digits in emitted floats")
    schema_version: int = Field(default=1, description="Version tag of emitted JSON")
    output_dir: str = Field(default=".", description="Default directory for sweep artifacts")

    @field_validator(
        "quad_rel_tol",
        "tail_mass_tol",
        "clamp_window",
        "failure_slack",
        "bisection_rel_tol",
    )
    @classmethod
    def validate_positive_float(cls, v: float) -> float:
        """Tolerances must be strictly positive."""
        if not v > 0:
            raise ValueError("tolerance must be positive")
        return v

    @field_validator(
        "threads",
        "quad_initial_nodes",
        "cluster_x_nodes",
        "cluster_panel_nodes",
        "cdf_knots",
        "max_samples",
        "bisection_max_iter",
    )
    @classmethod
    def validate_positive_int(cls, v: int) -> int:
        """Counts must be at least one."""
        if v < 1:
            raise ValueError("value must be a positive integer")
        return v

    @field_validator("eps_prime_fractions", mode="before")
    @classmethod
    def parse_eps_prime_fractions(cls, v) -> Tuple[float, ...]:
        """Parse comma-separated fractions in [0, 1)."""
        if isinstance(v, str):
            v = [item.strip() for item in v.split(",") if item.strip()]
        fractions: List[float] = sorted(float(item) for item in v)
        if not fractions or fractions[0] < 0 or fractions[-1] >= 1:
            raise ValueError("eps_prime_fractions must lie in [0, 1)")
        return tuple(fractions)

    @property
    def is_production(self) -> bool:
        """Check if running in production."""
        return self.app_env == "production"

    @property
    def is_development(self) -> bool:
        """Check if running in development."""
        return self.app_env == "development"


@lru_cache()
def get_settings() -> Settings:
    """Get cached settings instance."""
    return Settings()
