import logging

from pydantic_settings import BaseSettings, SettingsConfigDict
from rich.logging import RichHandler


class Settings(BaseSettings):
    app_name: str = "Foresight"
    environment: str = "dev"

    log_level: str = "INFO"

    # Process count for parallel folds; results never depend on it
    workers: int = 1

    # Default parent directory for run artifacts
    output_root: str = "runs"

    # Run ledger; empty string disables it
    database_url: str = "sqlite:///./foresight.db"

    model_config = SettingsConfigDict(
        env_prefix="FORESIGHT_",
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
    )


settings = Settings()


def configure_logging(level: str | None = None) -> None:
    """Route every `foresight.*` logger through a single rich handler."""
    root = logging.getLogger("foresight")
    root.setLevel((level or settings.log_level).upper())
    if not any(isinstance(h, RichHandler) for h in root.handlers):
        root.addHandler(
            RichHandler(show_path=False, rich_tracebacks=False, markup=False)
        )
    root.propagate = False
