"""
Configuration management for spectrafrac
"""

import logging
import os
from pathlib import Path
from typing import Optional

import yaml
from dotenv import load_dotenv
from pydantic import BaseModel, Field, ValidationError

from ..exceptions import ConfigError

logger = logging.getLogger(__name__)

ENV_HOME = "SPECTRAFRAC_HOME"
ENV_OVERRIDES = {
    "SPECTRAFRAC_SEED": "seed",
    "SPECTRAFRAC_JOBS": "jobs",
    "SPECTRAFRAC_OUTPUT_DIR": "output_dir",
}


class Config(BaseModel):
    seed: int = Field(default=0, ge=0, lt=2 ** 64)
    jobs: Optional[int] = Field(default=None, ge=1)
    output_dir: str = "spectrafrac-out"
    quantile: float = Field(default=0.95, gt=0.5, lt=1.0)
    n_sample: int = Field(default=400, ge=1)
    eps_min: float = Field(default=3.0 ** -12, gt=0)
    eps_max: float = Field(default=3.0 ** -2, gt=0)
    n_scales: int = Field(default=11, ge=4)
    kernel_ratio: float = Field(default=2.0 ** 0.25, gt=1.0)
    history_enabled: bool = True
    max_history: int = 100
    use_colors: bool = True
    verbose: bool = False

    @classmethod
    def get_config_dir(cls) -> Path:
        override = os.getenv(ENV_HOME)
        config_dir = Path(override) if override else Path.home() / ".spectrafrac"
        config_dir.mkdir(parents=True, exist_ok=True)
        return config_dir

    @classmethod
    def get_config_file(cls) -> Path:
        return cls.get_config_dir() / "config.yaml"

    @classmethod
    def load(cls) -> "Config":
        """Defaults < config.yaml < .env in the working directory < SPECTRAFRAC_* environment."""
        config_file = cls.get_config_file()
        config_data = {}
        if config_file.exists():
            try:
                with open(config_file, "r") as f:
                    config_data = yaml.safe_load(f) or {}
            except yaml.YAMLError as e:
                mark = getattr(e, "problem_mark", None)
                raise ConfigError(f"malformed YAML: {e}", str(config_file), mark.line + 1 if mark else None) from e
        env_file = Path(".env")
        if env_file.exists():
            load_dotenv(env_file)
        for env_name, field_name in ENV_OVERRIDES.items():
            value = os.getenv(env_name)
            if value:
                config_data[field_name] = value
        try:
            return cls(**config_data)
        except ValidationError as e:
            first = e.errors()[0]
            where = ".".join(str(k) for k in first.get("loc", ()))
            raise ConfigError(f"{where}: {first.get('msg')}", str(config_file)) from e

    def save(self):
        config_file = self.get_config_file()
        with open(config_file, "w") as f:
            yaml.dump(self.model_dump(), f, default_flow_style=False)
        logger.debug(f"Saved configuration to {config_file}")

    @property
    def history_file(self) -> Path:
        return self.get_config_dir() / "history.json"
