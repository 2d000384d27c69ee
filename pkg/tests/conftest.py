import numpy as np
import pytest

from config_data.cycle import CycleConfig

FAST_PROPAGATOR_TOL = 1e-8


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def make_config():
    """Конфигурация цикла с ускоренным пропагатором; остальные поля по умолчанию (параметры рис. 1)."""

    def factory(**values) -> CycleConfig:
        data = {"propagator_tol": FAST_PROPAGATOR_TOL}
        data.update(values)
        return CycleConfig(**data)

    return factory
