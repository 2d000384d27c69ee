import math

from config_data.cycle import CycleConfig
from validation.suite import (
    CLOSED_FORM,
    GENERIC,
    MULTISTART,
    ORACLE,
    TOLERANCES,
    aggregate,
    build_jobs,
    check_config,
    gad_measurements,
    propagator_measurements,
    random_config,
)


def test_random_configs_stay_in_range(rng):
    for _ in range(50):
        config = random_config(rng)
        assert config.d in (2, 3, 4)
        assert 0.05 <= config.lambda_h <= 1.0
        assert 0.0 <= config.g <= 10.0
        assert config.omega_h > config.omega_c > 0
        assert config.propagator_tol == 1e-8


def test_jobs_are_reproducible():
    first = build_jobs(7, 30, False)
    second = build_jobs(7, 30, False)
    assert [job[0] for job in first] == [job[0] for job in second]
    assert sum(ORACLE in job[1] for job in first) == 20
    assert all(job[0].d == 2 for job in first if ORACLE in job[1])


def test_check_config_measurements():
    config = CycleConfig(d=2, g=5.0, lambda_h=0.4, lambda_c=0.7, propagator_tol=1e-8)
    result = check_config(config, frozenset({GENERIC, CLOSED_FORM, ORACLE, MULTISTART}))
    assert "tpm-backaction-trivial" not in result
    for name, value in result.items():
        assert value < TOLERANCES[name], name


def test_check_config_detects_fault():
    config = CycleConfig(d=3, g=9.0, lambda_h=0.5, lambda_c=0.5, propagator_tol=1e-8)
    result = check_config(config, frozenset({CLOSED_FORM}), skip_dephasing=True)
    assert result["closed-form-agreement"] > TOLERANCES["closed-form-agreement"]


def test_trivial_configs_check_scheme_equivalence():
    config = CycleConfig(d=3, g=0.0, lambda_h=0.5, lambda_c=0.5, propagator_tol=1e-8)
    result = check_config(config, frozenset({GENERIC}))
    assert result["equivalence-kl"] < 1e-10
    assert result["tpm-backaction-trivial"] < 1e-10
    assert result["equivalence-conditions"] < 1e-9


def test_channel_and_propagator_properties(rng):
    assert gad_measurements(rng)["gad-channel"] < TOLERANCES["gad-channel"]
    measured = propagator_measurements()
    assert measured["propagator-unitarity"] < 1e-10
    assert measured["propagator-order"] < 0.3


def test_aggregate_counts_failures():
    results = {result.name: result for result in aggregate([{"dbn-exactness": 1e-12}, {"dbn-exactness": 1e-3}])}
    exactness = results["dbn-exactness"]
    assert (exactness.checked, exactness.failed) == (2, 1)
    assert not exactness.passed
    assert exactness.worst == 1e-3
    assert results["oracle-joint"].checked == 0
    assert results["oracle-joint"].passed
    assert math.isnan(results["oracle-joint"].worst)


def test_failed_evaluation_is_reported(monkeypatch):
    import validation.suite as suite

    def broken(config, skip_dephasing=False):
        raise RuntimeError("сбой")

    monkeypatch.setattr(suite, "analyze_cycle", broken)
    assert check_config(CycleConfig(d=2), frozenset({GENERIC})) == {"evaluation": 1.0}


def test_multistart_agreement_at_small_rates():
    assert math.isclose(TOLERANCES["limit-cycle-multistart"], 1e-12)
    config = CycleConfig(d=3, g=7.0, lambda_h=0.05, lambda_c=0.08, propagator_tol=1e-8)
    result = check_config(config, frozenset({MULTISTART}), seed=3)
    assert result["limit-cycle-multistart"] < 10 * config.fixed_point_tol


def test_multistart_covers_every_random_rate():
    jobs = build_jobs(11, 25, False)
    assert sum(MULTISTART in job[1] for job in jobs) == 20
