#!/usr/bin/env python3
"""
Configuration settings for polyred
"""

from fractions import Fraction

from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class PolyredSettings(BaseSettings):
    """Configuration settings, read from POLYRED_* environment variables"""

    model_config = SettingsConfigDict(env_prefix="POLYRED_", extra="ignore")

    # Campaign execution
    threads: int = Field(default=4, ge=1)
    default_trials: int = Field(default=1000, ge=1)
    master_seed: int = 20240501
    dim_max: int = Field(default=12, ge=2, le=40)
    k_max: int = Field(default=3, ge=1, le=8)
    adversarial_fraction: str = "1/4"
    coefficient_box: int = Field(default=2, ge=1)

    # Storage settings
    storage_path: str = "./storage"

    # Observability settings
    enable_file_logging: bool = False
    log_level: str = "INFO"

    @field_validator("adversarial_fraction")
    @classmethod
    def _check_fraction(cls, value: str) -> str:
        try:
            ratio = Fraction(value)
        except (ValueError, ZeroDivisionError) as e:
            raise ValueError(f"not a rational number: {value!r}") from e
        if not 0 <= ratio <= 1:
            raise ValueError("adversarial_fraction must lie in [0, 1]")
        return value

    @classmethod
    def from_env(cls) -> "PolyredSettings":
        """Create settings from environment variables"""
        return cls()


# Global settings instance
settings = PolyredSettings.from_env()
