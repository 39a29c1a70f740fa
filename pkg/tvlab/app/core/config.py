from pydantic_settings import BaseSettings, SettingsConfigDict
import os


class Settings(BaseSettings):
    # App Settings
    APP_NAME: str = "TV Robust Learning Lab"
    VERSION: str = "1.0.0"
    DEBUG: bool = False
    LOG_LEVEL: str = "INFO"

    # Enumeration limits
    FAMILY_CAP: int = 100_000  # max members listed from a family slice
    SUBSET_CAP: int = 2 ** 18  # max subsets enumerated by robustify

    # Experiment defaults
    DEFAULT_SEED: int = 0
    DEFAULT_WORKERS: int = 0  # 0 means os.cpu_count()
    OUTPUT_DIR: str = "reports"
    CONFIG_DIR: str = "configs"

    model_config = SettingsConfigDict(
        env_prefix="TVLAB_",
        env_file=".env",
        case_sensitive=True,
    )

    @property
    def workers(self) -> int:
        """Resolve the default worker count"""
        return self.DEFAULT_WORKERS or os.cpu_count() or 1


settings = Settings()
