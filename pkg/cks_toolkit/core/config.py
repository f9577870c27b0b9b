"""Application configuration settings."""
from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Application settings."""

    app_name: str = "CKS Toolkit"
    app_version: str = "0.1.0"
    debug: bool = False

    # API Settings
    api_v1_prefix: str = "/api/v1"

    # Logging
    log_level: str = "INFO"

    # Worker pool for condition checks (CKS_TOOLKIT_THREADS)
    threads: int = Field(default=1, ge=1)

    # Numeric tolerances
    optimize_tol: float = Field(default=1e-9, gt=0)  # abscissa width for golden section
    series_tol: float = Field(default=1e-12, gt=0)  # relative tail bound
    compare_slack: float = Field(default=1e-8, gt=0)  # log-scale inequality slack
    series_max_terms: int = Field(default=10000, ge=1)

    # Bracket range in log-abscissa, keeps e^x representable
    bracket_min_x: float = -700.0
    bracket_max_x: float = 700.0

    # Tables and evidence thresholds
    default_table_depth: int = Field(default=100, ge=2)
    limit_ratio_threshold: float = 50.0
    u2_ratio_cap: float = 1e3
    root_log_threshold: float = 0.0
    equivalence_spread_cap: float = 0.25
    edge_window: int = Field(default=10, ge=3)
    edge_drift_tol: float = 1e-6
    reconstruct_t_max: float = 1e5  # initial t range for reconstruction
    reconstruct_t_limit: float = 1e12

    # OpenTelemetry Configuration
    enable_tracing: bool = False
    trace_console: bool = False  # print spans to stderr instead of exporting
    service_name: str = "cks-toolkit"
    otlp_endpoint: str = "http://localhost:4317"  # OTLP gRPC endpoint

    model_config = SettingsConfigDict(
        env_prefix="CKS_TOOLKIT_",
        env_file=".env",
        case_sensitive=False,
        extra="ignore",
    )


settings = Settings()
