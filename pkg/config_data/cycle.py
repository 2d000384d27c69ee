import hashlib
import math
from typing import Any, Dict

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

CACHE_SCHEMA_VERSION = "1"

LINKED_PARAMETERS = {"lambda": ("lambda_h", "lambda_c")}
TIME_PARAMETERS = {"t_h": "lambda_h", "t_c": "lambda_c"}


def rate_from_time(t: float) -> float:
    """Скорость термализации по времени контакта с резервуаром, λ = 1 − exp(−t).
    :param t: Время термализации (может быть inf).
    :return float: λ в [0, 1].
    """
    if t < 0:
        raise ValueError(f"время термализации должно быть неотрицательным, получено {t}")
    if math.isinf(t):
        return 1.0
    return -math.expm1(-t)


def time_from_rate(lam: float) -> float:
    if lam >= 1.0:
        return math.inf
    return -math.log1p(-lam)


class CycleConfig(BaseModel):
    """Все физические и численные параметры одного цикла Отто (ħ = k_B = 1)."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    d: int = Field(default=3, ge=2, le=64)
    omega_h: float = 10.0
    omega_c: float = 0.5
    T_h: float = Field(default=14.0, gt=0)
    T_c: float = Field(default=0.1, gt=0)
    g: float = Field(default=9.0, ge=0)
    t_k: float = Field(default=1.0, gt=0)
    t_e: float = Field(default=1.0, gt=0)
    lambda_h: float = Field(default=0.5, ge=0, le=1)
    lambda_c: float = Field(default=0.5, ge=0, le=1)
    propagator_steps: int = Field(default=256, ge=2)
    propagator_tol: float = Field(default=1e-11, gt=0)
    fixed_point_tol: float = Field(default=1e-13, gt=0)
    grouping_tol: float = Field(default=1e-9, gt=0)
    merge_tol: float = Field(default=1e-9, gt=0)
    regime_tol: float = Field(default=1e-10, ge=0)
    max_iterations: int = Field(default=100000, ge=1)

    @model_validator(mode="before")
    @classmethod
    def expand_shortcuts(cls, data: Any) -> Any:
        if not isinstance(data, dict):
            return data
        data = dict(data)
        for alias, targets in LINKED_PARAMETERS.items():
            if alias in data:
                value = data.pop(alias)
                for target in targets:
                    data.setdefault(target, value)
        for time_key, rate_key in TIME_PARAMETERS.items():
            if time_key in data:
                data.setdefault(rate_key, rate_from_time(float(data.pop(time_key))))
        return data

    @field_validator("omega_h", "omega_c", "T_h", "T_c", "g", "t_k", "t_e")
    @classmethod
    def finite(cls, value: float) -> float:
        if not math.isfinite(value):
            raise ValueError("значение должно быть конечным")
        return value

    @model_validator(mode="after")
    def frequencies_ordered(self) -> "CycleConfig":
        if not self.omega_h > self.omega_c > 0:
            raise ValueError(
                f"omega_h: требуется omega_h > omega_c > 0, получено omega_h={self.omega_h}, omega_c={self.omega_c}"
            )
        return self

    @property
    def t_h(self) -> float:
        return time_from_rate(self.lambda_h)

    @property
    def t_c(self) -> float:
        return time_from_rate(self.lambda_c)

    @property
    def iteration_cap(self) -> int:
        # медленное сжатие при почти нулевой связи с резервуарами
        if max(self.lambda_h, self.lambda_c) < 1e-3:
            return max(self.max_iterations, 1_000_000)
        return self.max_iterations

    def stroke_key(self) -> tuple:
        """Параметры, от которых зависят унитарные ходы цикла."""
        return (
            self.d,
            self.omega_h,
            self.omega_c,
            self.g,
            self.t_k,
            self.t_e,
            self.propagator_steps,
            self.propagator_tol,
        )

    def canonical_hash(self) -> str:
        payload = CACHE_SCHEMA_VERSION + ":" + self.model_dump_json()
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()

    def with_values(self, values: Dict[str, Any]) -> "CycleConfig":
        """Новая конфигурация с заменёнными полями (с полной повторной проверкой)."""
        data = self.model_dump()
        for key, value in values.items():
            if key in LINKED_PARAMETERS:
                for target in LINKED_PARAMETERS[key]:
                    data[target] = value
            elif key in TIME_PARAMETERS:
                data[TIME_PARAMETERS[key]] = rate_from_time(float(value))
            else:
                data[key] = value
        return CycleConfig.model_validate(data)


def is_config_parameter(name: str) -> bool:
    return name in CycleConfig.model_fields or name in LINKED_PARAMETERS or name in TIME_PARAMETERS
