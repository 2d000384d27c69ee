import json
from pathlib import Path
from typing import Any, Dict, List, Optional

from pydantic import ValidationError

from config_data.config import settings
from config_data.cycle import LINKED_PARAMETERS, TIME_PARAMETERS, is_config_parameter
from loader import argument
from qcore.errors import OttoError
from sweep.spec import SweepSpec

DEFAULT_COMMANDS = (
    ("simulate", "Расчёт одного цикла и запись распределений"),
    ("sweep", "Расчёт сетки параметров из файла конфигурации"),
    ("figure", "Данные для рисунка по встроенному пресету"),
    ("validate", "Проверка свойств на случайных конфигурациях"),
)

OUT_ARGUMENT = argument("--out", type=Path, required=True, help="Каталог для результатов")
CONFIG_ARGUMENT = argument("--config", type=Path, required=True, help="JSON-файл конфигурации")
SET_ARGUMENT = argument(
    "--set",
    dest="overrides",
    action="append",
    default=[],
    metavar="КЛЮЧ=ЗНАЧЕНИЕ",
    help="Замена параметра после чтения файла (можно указать несколько раз)",
)
PARALLELISM_ARGUMENT = argument(
    "--parallelism", type=int, default=None, help="Число рабочих процессов (по умолчанию OTTO_PARALLELISM)"
)


class UsageError(OttoError, ValueError):
    """Ошибка в аргументах командной строки."""


def parse_overrides(pairs: List[str]) -> Dict[str, Any]:
    """Разбирает замены вида key=value; значение читается как JSON, иначе остаётся строкой.
    :param pairs: Строки key=value.
    :return Dict[str, Any]: Замены в порядке указания.
    """
    overrides: Dict[str, Any] = {}
    for pair in pairs:
        key, separator, text = pair.partition("=")
        if not separator or not key:
            raise UsageError(f"замена должна иметь вид key=value, получено '{pair}'")
        try:
            overrides[key.strip()] = json.loads(text)
        except json.JSONDecodeError:
            overrides[key.strip()] = text
    return overrides


def apply_overrides(raw: Dict[str, Any], overrides: Dict[str, Any], sweep: bool = False) -> Dict[str, Any]:
    """Применяет замены по точечным путям к прочитанному JSON.
    Для файла одного цикла ключ - поле CycleConfig; для сетки - путь от корня (base.g, outputs).
    """
    raw = json.loads(json.dumps(raw))
    for key, value in overrides.items():
        path = key.split(".")
        if sweep:
            valid = (path[0] == "base" and len(path) == 2 and is_config_parameter(path[1])) or (
                len(path) == 1 and path[0] in SweepSpec.model_fields
            )
        else:
            valid = len(path) == 1 and is_config_parameter(path[0])
        if not valid:
            raise UsageError(f"неизвестный ключ замены: {key}")
        target = raw
        for part in path[:-1]:
            target = target.setdefault(part, {})
        # псевдоним заменяет поля, которые он задаёт
        for replaced in LINKED_PARAMETERS.get(path[-1], ()):
            target.pop(replaced, None)
        if path[-1] in TIME_PARAMETERS:
            target.pop(TIME_PARAMETERS[path[-1]], None)
        target[path[-1]] = value
    return raw


def read_json(path: Path) -> Dict[str, Any]:
    if not Path(path).is_file():
        raise FileNotFoundError(f"файл конфигурации не найден: {path}")
    with open(path, "r", encoding="utf-8") as file:
        data = json.load(file)
    if not isinstance(data, dict):
        raise UsageError(f"ожидался JSON-объект в {path}")
    return data


def resolve_parallelism(value: Optional[int]) -> int:
    parallelism = settings.PARALLELISM if value is None else value
    if parallelism < 1:
        raise UsageError(f"--parallelism должен быть ≥ 1, получено {parallelism}")
    return parallelism


def describe_validation_error(error: ValidationError) -> str:
    """Сообщение с именами полей, не прошедших проверку."""
    parts = []
    for item in error.errors():
        location = ".".join(str(part) for part in item["loc"])
        message = item["msg"].removeprefix("Value error, ")
        parts.append(f"{location}: {message}" if location else message)
    return "; ".join(parts)
