import itertools
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Iterator, List, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from API.engine_api import OUTPUT_NAMES
from config_data.cycle import CycleConfig, is_config_parameter

STATUS_OK = "ok"
STATUS_KL_INFINITE = "kl-infinite"
STATUS_ETA2_UNDEFINED = "eta2-undefined"
STATUS_NON_CONVERGED = "non-converged"
STATUS_FAILED = "failed"


class Axis(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    param: str
    values: List[float] = Field(min_length=1)

    @field_validator("param")
    @classmethod
    def known_parameter(cls, value: str) -> str:
        if not is_config_parameter(value):
            raise ValueError(f"неизвестный параметр оси: {value}")
        return value


class SweepSpec(BaseModel):
    """Сетка параметров: базовая конфигурация, оси и запрашиваемые величины."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    base: CycleConfig = Field(default_factory=CycleConfig)
    axes: List[Axis] = Field(default_factory=list)
    outputs: List[str] = Field(default_factory=lambda: list(OUTPUT_NAMES))

    @field_validator("outputs")
    @classmethod
    def known_outputs(cls, value: List[str]) -> List[str]:
        unknown = [name for name in value if name not in OUTPUT_NAMES]
        if unknown:
            raise ValueError(f"неизвестные выходные величины: {', '.join(unknown)}")
        if not value:
            raise ValueError("список выходных величин пуст")
        return value

    @model_validator(mode="after")
    def grid_is_valid(self) -> "SweepSpec":
        names = [axis.param for axis in self.axes]
        if len(set(names)) != len(names):
            raise ValueError("оси сетки повторяются")
        for _ in self.points():
            pass
        return self

    @property
    def axis_names(self) -> List[str]:
        return [axis.param for axis in self.axes]

    @property
    def size(self) -> int:
        return math.prod(len(axis.values) for axis in self.axes)

    def points(self) -> Iterator[Tuple[Tuple[int, ...], Dict[str, float], CycleConfig]]:
        """Точки сетки в лексикографическом порядке индексов."""
        ranges = [range(len(axis.values)) for axis in self.axes]
        for index in itertools.product(*ranges):
            parameters = {axis.param: axis.values[i] for axis, i in zip(self.axes, index)}
            yield index, parameters, self.base.with_values(parameters)

    @classmethod
    def from_file(cls, path: Path) -> "SweepSpec":
        with open(path, "r", encoding="utf-8") as file:
            return cls.model_validate(json.load(file))


@dataclass(frozen=True)
class SweepResult:
    index: Tuple[int, ...]
    parameters: Dict[str, float]
    values: Dict[str, Any] = field(default_factory=dict)
    status: str = STATUS_OK


def row_from_payload(payload: Dict[str, Any], outputs: List[str]) -> Tuple[Dict[str, Any], str]:
    """Значения запрошенных величин и статус точки; поражённые поля обнуляются в None.
    :param payload: {"values": ..., "error": ...} из расчёта или кэша.
    :param outputs: Запрошенные величины.
    :return tuple: (значения, статус).
    """
    if payload.get("error"):
        return {name: None for name in outputs}, payload["error"]

    source = payload["values"]
    values = {name: source.get(name) for name in outputs}
    flags = []
    kl = values.get("kl")
    if "kl" in outputs and kl is not None and math.isinf(kl):
        values["kl"] = None
        flags.append(STATUS_KL_INFINITE)
    undefined = False
    for scheme in ("tpm", "dbn"):
        if source.get(f"eta2_{scheme}") is None:
            for name in (f"eta2_{scheme}", f"eta2_ratio_{scheme}"):
                if name in outputs:
                    values[name] = None
                    undefined = True
    if undefined:
        flags.append(STATUS_ETA2_UNDEFINED)
    return values, "+".join(flags) if flags else STATUS_OK


def linspace_values(start: float, stop: float, count: int) -> List[float]:
    """Равномерная сетка с точными концами, значения округлены до 12 знаков для стабильных ключей кэша."""
    if count == 1:
        return [float(stop)]
    step = (stop - start) / (count - 1)
    return [round(start + i * step, 12) for i in range(count)]

