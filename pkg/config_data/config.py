from pathlib import Path
from typing import Optional

from dotenv import load_dotenv
from pydantic_settings import BaseSettings, SettingsConfigDict

load_dotenv()


class Settings(BaseSettings):
    CACHE_DIR: Optional[Path] = None
    LOG_LEVEL: str = "INFO"
    PARALLELISM: int = 1

    model_config = SettingsConfigDict(env_prefix="OTTO_", env_file=".env", extra="ignore")


def resolve_cache_dir(out_dir: Path) -> Path:
    """Каталог кэша точек сетки.
    :param out_dir: Каталог с результатами; кэш по умолчанию лежит рядом с ними.
    :return Path: OTTO_CACHE_DIR, если задан, иначе <out_dir>/.otto_cache.
    """
    current = Settings()
    if current.CACHE_DIR is not None:
        return Path(current.CACHE_DIR)
    return Path(out_dir) / ".otto_cache"


settings = Settings()
