from datetime import datetime
from pathlib import Path

from peewee import CharField, DateTimeField, Model, SqliteDatabase, TextField

db = SqliteDatabase(None)


class BaseModel(Model):
    class Meta:
        database = db


class SweepPoint(BaseModel):
    config_hash = CharField(primary_key=True, max_length=64)
    config_json = TextField()
    payload = TextField()
    timestamp = DateTimeField(default=datetime.now)


def init_cache(cache_dir: Path) -> None:
    """Открывает (или создаёт) SQLite-кэш точек сетки в каталоге cache_dir."""
    cache_dir = Path(cache_dir)
    cache_dir.mkdir(parents=True, exist_ok=True)
    if not db.is_closed():
        db.close()
    db.init(str(cache_dir / "points.db"))
    db.connect()
    db.create_tables([SweepPoint])


def close_cache() -> None:
    if not db.is_closed():
        db.close()
