import math

import pytest
from pydantic import ValidationError

from config_data.cycle import CycleConfig, is_config_parameter, rate_from_time, time_from_rate


def test_defaults_follow_coherent_engine_preset():
    config = CycleConfig()
    assert (config.d, config.omega_h, config.omega_c, config.T_h, config.T_c, config.g) == (3, 10.0, 0.5, 14.0, 0.1, 9.0)
    assert config.t_k == config.t_e == 1.0


def test_lambda_alias_sets_both_rates():
    config = CycleConfig(**{"lambda": 0.3})
    assert config.lambda_h == config.lambda_c == 0.3


def test_explicit_rate_wins_over_alias():
    config = CycleConfig(**{"lambda": 0.3, "lambda_h": 0.8})
    assert (config.lambda_h, config.lambda_c) == (0.8, 0.3)


def test_thermalization_time_conversion():
    config = CycleConfig(t_h=0.92, t_c=math.inf)
    assert math.isclose(config.lambda_h, 1 - math.exp(-0.92))
    assert config.lambda_c == 1.0
    assert math.isclose(config.t_h, 0.92)
    assert math.isinf(config.t_c)


def test_rate_time_round_trip():
    assert rate_from_time(0.0) == 0.0
    assert math.isinf(time_from_rate(1.0))
    assert math.isclose(time_from_rate(rate_from_time(1.7)), 1.7)
    with pytest.raises(ValueError):
        rate_from_time(-1.0)


@pytest.mark.parametrize(
    "values",
    [
        {"omega_h": 0.4, "omega_c": 0.5},
        {"omega_c": 0.0},
        {"T_c": 0.0},
        {"g": -1.0},
        {"lambda_h": 1.2},
        {"d": 1},
        {"g": math.inf},
        {"unknown": 1.0},
    ],
)
def test_invalid_configs_are_rejected(values):
    with pytest.raises(ValidationError):
        CycleConfig(**values)


def test_canonical_hash_is_stable_and_sensitive():
    a = CycleConfig(g=2.0)
    assert a.canonical_hash() == CycleConfig(g=2.0).canonical_hash()
    assert a.canonical_hash() != CycleConfig(g=2.5).canonical_hash()


def test_with_values_revalidates():
    config = CycleConfig().with_values({"lambda": 0.25, "g": 0.0})
    assert (config.lambda_h, config.lambda_c, config.g) == (0.25, 0.25, 0.0)
    with pytest.raises(ValidationError):
        CycleConfig().with_values({"omega_c": 20.0})


def test_stroke_key_ignores_thermalization():
    assert CycleConfig(lambda_h=0.1).stroke_key() == CycleConfig(lambda_h=0.9).stroke_key()
    assert CycleConfig(g=1.0).stroke_key() != CycleConfig(g=2.0).stroke_key()


def test_is_config_parameter():
    assert is_config_parameter("g")
    assert is_config_parameter("lambda")
    assert is_config_parameter("t_h")
    assert not is_config_parameter("temperature")
