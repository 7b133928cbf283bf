"""
Configuration management for mrdlab.
Loads MRDLAB_* environment variables (and .env) and provides centralized config access.
"""

import os
from pathlib import Path
from typing import Literal
from pydantic_settings import BaseSettings, SettingsConfigDict
from pydantic import Field


class Config(BaseSettings):
    """Application configuration loaded from environment variables."""

    model_config = SettingsConfigDict(
        env_prefix='MRDLAB_',
        env_file='.env',
        env_file_encoding='utf-8',
        case_sensitive=False,
        extra='ignore'
    )

    # Enumeration guards
    enumeration_cap: int = Field(
        default=2**24,
        ge=1,
        description="Maximum number of states any exhaustive enumeration may visit"
    )
    exact_event_cap: int = Field(
        default=2**28,
        ge=1,
        description="Maximum elementary events for exact random-coding sweeps"
    )
    mrd_cross_check_limit: int = Field(
        default=2**16,
        ge=1,
        description="Codes up to this size are verified by both MRD criteria"
    )

    # Search Configuration
    symmetry_group_cap: int = Field(
        default=2**20,
        ge=1,
        description="Largest symmetry group the search will enumerate"
    )
    search_node_budget: int = Field(
        default=50_000_000,
        ge=1,
        description="Default node budget for blocking-set searches"
    )
    search_time_budget: float = Field(
        default=1800.0,
        gt=0.0,
        description="Default wall-clock budget for blocking-set searches (seconds)"
    )

    # Reproducibility & Parallelism
    seed: int = Field(
        default=0,
        ge=0,
        description="Default seed for every random generator"
    )
    threads: int = Field(
        default_factory=lambda: os.cpu_count() or 1,
        ge=1,
        description="Worker processes for parallel sweeps and searches"
    )

    # Output Configuration
    output_dir: Path = Field(
        default=Path("reports"),
        description="Directory for battery reports and witness files"
    )
    log_level: Literal["DEBUG", "INFO", "WARNING", "ERROR"] = Field(
        default="INFO",
        description="Root log level"
    )
    log_file: str = Field(
        default="mrdlab.log",
        description="Log file path (empty string disables the file handler)"
    )
    audit_logs_enabled: bool = Field(
        default=True,
        description="Save JSON report and markdown summary after a battery run"
    )

    def validate_limits(self):
        """Validate cross-field constraints."""
        errors = []

        for name in ("enumeration_cap", "exact_event_cap", "mrd_cross_check_limit", "symmetry_group_cap", "search_node_budget"):
            if getattr(self, name) < 1:
                errors.append(f"{name} must be a positive integer")

        if self.threads < 1:
            errors.append("threads must be at least 1")

        if errors:
            raise ValueError(f"Configuration errors: {', '.join(errors)}")

    def ensure_output_dir(self) -> Path:
        """Create output directory if it doesn't exist."""
        self.output_dir.mkdir(parents=True, exist_ok=True)
        return self.output_dir


# Global config instance
_config: Config | None = None


def get_config() -> Config:
    """Get or create global config instance."""
    global _config
    if _config is None:
        _config = Config()
    return _config


def load_config(validate: bool = True, **overrides) -> Config:
    """
    Load configuration from environment.

    Args:
        validate: If True, validate cross-field limits
        **overrides: Field values that replace the environment for this process

    Returns:
        Config instance
    """
    global _config
    config = get_config()
    if overrides:
        updates = {key: value for key, value in overrides.items() if value is not None}
        config = Config(**{**config.model_dump(), **updates})
        _config = config
    if validate:
        config.validate_limits()
    return config


def reset_config():
    """Drop the cached instance so the next get_config() re-reads the environment."""
    global _config
    _config = None


if __name__ == "__main__":
    try:
        config = load_config(validate=True)
        print("Configuration loaded successfully:")
        print(f"  Enumeration cap: {config.enumeration_cap}")
        print(f"  Search budget: {config.search_node_budget} nodes / {config.search_time_budget}s")
        print(f"  Seed: {config.seed}, threads: {config.threads}")
        print(f"  Output directory: {config.output_dir}")
    except Exception as e:
        print(f"Configuration error: {e}")
