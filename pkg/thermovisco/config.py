from typing import Annotated, Optional

from dotenv import find_dotenv
from pydantic import BaseModel, Field
from pydantic_settings import BaseSettings, SettingsConfigDict

__all__ = [
    "Config",
    "ConfigLogging",
    "ConfigOutput",
    "ConfigMetrics",
]

ENV_PREFIX = "TVS"


class ConfigLogging(BaseModel):
    level: str = "INFO"
    format_json: bool = True
    to_file: Optional[str] = None


class ConfigOutput(BaseModel):
    # Overrides the scenario's output directory. Never part of the experiment itself.
    directory: Optional[str] = None


class ConfigMetrics(BaseModel):
    enabled: bool = False
    host: str = "0.0.0.0"
    port: int = 8082


class Config(BaseSettings):
    model_config = SettingsConfigDict(
        env_nested_delimiter="__",
        env_prefix=f"{ENV_PREFIX}_",
        protected_namespaces=(),
        env_file=find_dotenv(),
        env_file_encoding="utf-8",
        extra="ignore",
    )

    logging: Annotated[ConfigLogging, Field(default_factory=ConfigLogging)] = (
        ConfigLogging()
    )
    output: Annotated[ConfigOutput, Field(default_factory=ConfigOutput)] = (
        ConfigOutput()
    )
    metrics: Annotated[ConfigMetrics, Field(default_factory=ConfigMetrics)] = (
        ConfigMetrics()
    )
