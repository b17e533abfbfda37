"""Configuration models for the analyzer."""

from pathlib import Path
from typing import Literal

from pydantic import BaseModel, Field, model_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

from src.constants import (
    DEFAULT_CHUNK_SIZE,
    DEFAULT_MAX_CONCURRENT,
    DEFAULT_N_MAX,
    DEFAULT_N_MIN,
    DEFAULT_SEED,
    DEFAULT_TRIALS,
    ITERATIVE_MAX_SWEEPS,
    ITERATIVE_TOLERANCE,
    LM_DAMPING_FACTOR,
    LM_INITIAL_DAMPING,
    LM_MAX_ITERATIONS,
    LM_TOLERANCE,
    MAX_SEED,
    PRISM_MODEL_EXTENSION,
    PRISM_PROPERTIES_EXTENSION,
    PRISM_SIGNIFICANT_DIGITS,
)
from src.models.quantum import DetectionRule, EveCorrectRule


class AnalyzerMetadata(BaseModel):
    """Analyzer metadata."""

    name: str = Field(default="qkd-analyzer")
    version: str = Field(default="1.0.0")


class AnalysisConfig(BaseModel):
    """Defaults for chain construction and sweeps."""

    detection: DetectionRule = Field(default=DetectionRule.SAME_BASIS_MISMATCH)
    eve_rule: EveCorrectRule = Field(default=EveCorrectRule.BASIS_AND_BIT_MATCH_SIFTED)
    stop_on_detect: bool = Field(default=True)
    n_min: int = Field(default=DEFAULT_N_MIN, ge=1)
    n_max: int = Field(default=DEFAULT_N_MAX, ge=1)
    max_concurrent: int = Field(default=DEFAULT_MAX_CONCURRENT, ge=1)

    @model_validator(mode="after")
    def _check_range(self) -> "AnalysisConfig":
        if self.n_min > self.n_max:
            raise ValueError("n_min must not exceed n_max")
        return self


class SimulationConfig(BaseModel):
    """Monte Carlo defaults."""

    trials: int = Field(default=DEFAULT_TRIALS, ge=1)
    seed: int = Field(default=DEFAULT_SEED, ge=0, le=MAX_SEED)
    workers: int = Field(default=1, ge=1)
    chunk_size: int = Field(default=DEFAULT_CHUNK_SIZE, ge=1)


class FittingConfig(BaseModel):
    """Levenberg-Marquardt settings."""

    initial_damping: float = Field(default=LM_INITIAL_DAMPING, gt=0.0)
    damping_factor: float = Field(default=LM_DAMPING_FACTOR, gt=1.0)
    max_iterations: int = Field(default=LM_MAX_ITERATIONS, ge=1)
    tolerance: float = Field(default=LM_TOLERANCE, gt=0.0)


class SolverConfig(BaseModel):
    """Iterative reachability settings for cyclic chains."""

    iterative_tolerance: float = Field(default=ITERATIVE_TOLERANCE, gt=0.0)
    max_sweeps: int = Field(default=ITERATIVE_MAX_SWEEPS, ge=1)


class ExportConfig(BaseModel):
    """PRISM export settings."""

    significant_digits: int = Field(default=PRISM_SIGNIFICANT_DIGITS, ge=1, le=30)
    model_extension: str = Field(default=PRISM_MODEL_EXTENSION)
    properties_extension: str = Field(default=PRISM_PROPERTIES_EXTENSION)


class LoggingConfig(BaseModel):
    """Logging configuration for loguru."""

    level: Literal["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"] = Field(default="WARNING")
    serialize: bool = Field(default=True, description="Serialize file logs to JSON")
    colorize: bool = Field(default=True, description="Colorize console output")
    file_path: str | None = Field(default=None, description="Log file; None disables it")
    rotation: str = Field(default="50 MB", description="Log rotation size/time")
    retention: str = Field(default="30 days", description="Log retention period")
    compression: str = Field(default="zip", description="Compression format for rotated logs")


class AnalyzerConfig(BaseModel):
    """Complete analyzer configuration."""

    analyzer: AnalyzerMetadata = Field(default_factory=AnalyzerMetadata)
    analysis: AnalysisConfig = Field(default_factory=AnalysisConfig)
    simulation: SimulationConfig = Field(default_factory=SimulationConfig)
    fitting: FittingConfig = Field(default_factory=FittingConfig)
    solver: SolverConfig = Field(default_factory=SolverConfig)
    export: ExportConfig = Field(default_factory=ExportConfig)
    logging: LoggingConfig = Field(default_factory=LoggingConfig)


class AnalyzerSettings(BaseSettings):
    """Environment overrides (prefix ``QKD_ANALYZER_``, ``.env`` honoured)."""

    model_config = SettingsConfigDict(env_prefix="QKD_ANALYZER_", env_file=".env", extra="ignore")

    output_dir: Path = Field(default=Path("models"), description="Default export directory")
    config: Path = Field(default=Path("config/analyzer.yaml"), description="Config file")
