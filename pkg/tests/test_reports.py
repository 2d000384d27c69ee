import numpy as np
import pytest

from engine.cycle import build_cycle, limit_cycle, unmeasured_thermo
from measurement_stats.joints import Scheme
from measurement_stats.reports import (
    SchemeReport,
    avg_post_measurement_state,
    check_equivalence_conditions,
    closed_form_report,
    default_probes,
    first_law_residual,
    fluctuation_ratio,
    tpm_moment_chain,
)
from qcore.metrics import trace_distance
from sweep.figures import QUASISTATIC_ENGINE


def solve(config):
    ops = build_cycle(config)
    return ops, limit_cycle(ops, config)


def report_with(var_w, var_qh):
    return SchemeReport(Scheme.TPM, 0.0, var_w, 0.0, var_qh, 0.0, 0.0, 0.0, var_w, 0.0, var_qh, 0.0, 0.0, 0.0)


@pytest.mark.parametrize("d", [2, 3, 4])
@pytest.mark.parametrize("scheme", list(Scheme))
def test_closed_forms_agree_with_distributions(make_config, d, scheme):
    config = make_config(d=d, lambda_h=0.35, lambda_c=0.6, g=4.0)
    ops, corners = solve(config)
    assert closed_form_report(scheme, corners, ops, config).disagreement() < 1e-8


def test_dbn_means_reproduce_unmeasured_cycle(make_config):
    config = make_config(**{"lambda": 0.3})
    ops, corners = solve(config)
    report = closed_form_report(Scheme.DBN, corners, ops, config)
    thermo = unmeasured_thermo(corners, ops, config)
    assert abs(report.closed_form_mean_w - thermo.work) < 1e-10
    assert abs(report.mean_w - thermo.work) < 1e-9
    assert abs(report.first_law_residual) < 1e-10


def test_tpm_mean_work_without_driving(make_config):
    config = make_config(g=0.0, **{"lambda": 0.3})
    ops, corners = solve(config)
    report = closed_form_report(Scheme.TPM, corners, ops, config)
    assert abs(report.closed_form_mean_w - unmeasured_thermo(corners, ops, config).work) < 1e-10


def test_tpm_first_law_deviation(make_config):
    config = make_config(**{"lambda": 0.3})
    ops, corners = solve(config)
    report = closed_form_report(Scheme.TPM, corners, ops, config)
    assert abs(report.mean_w - report.mean_qh - report.mean_qc - report.first_law_residual) < 1e-10
    assert abs(report.first_law_residual) > 1e-6


def test_skipped_dephasing_breaks_tpm_closed_forms(make_config):
    config = make_config(**{"lambda": 0.5})
    ops, corners = solve(config)
    faulty = closed_form_report(Scheme.TPM, corners, ops, config, skip_dephasing=True)
    assert faulty.disagreement() > 1e-8
    assert first_law_residual(Scheme.TPM, corners, ops, config, skip_dephasing=True) != pytest.approx(
        first_law_residual(Scheme.TPM, corners, ops, config), abs=1e-8
    )


def test_moment_chain_normalization(make_config):
    config = make_config(**{"lambda": 0.5})
    ops, corners = solve(config)
    assert abs(tpm_moment_chain(ops, config, corners.rho1.matrix, (0, 0, 0, 0, 0)) - 1.0) < 1e-12


def test_dbn_average_state_has_no_backaction(make_config):
    for lam in (0.1, 0.5, 1.0):
        config = make_config(**{"lambda": lam})
        ops, corners = solve(config)
        average = avg_post_measurement_state(Scheme.DBN, corners, ops, config)
        assert trace_distance(average, corners.rho1) < 1e-10


def test_tpm_backaction(make_config):
    undriven = make_config(g=0.0, **{"lambda": 0.3})
    ops, corners = solve(undriven)
    assert trace_distance(avg_post_measurement_state(Scheme.TPM, corners, ops, undriven), corners.rho1) < 1e-10

    driven = make_config(**{"lambda": 0.3})
    ops, corners = solve(driven)
    assert trace_distance(avg_post_measurement_state(Scheme.TPM, corners, ops, driven), corners.rho1) > 1e-3


def test_equivalence_conditions(make_config):
    holds, worst = check_equivalence_conditions(build_cycle(make_config(g=0.0)), make_config(g=0.0))
    assert holds
    assert worst < 1e-12

    config = make_config()
    holds, worst = check_equivalence_conditions(build_cycle(config), config)
    assert not holds
    assert worst > 1e-3


def test_default_probes_are_seeded(make_config):
    ops = build_cycle(make_config())
    first = default_probes(ops)
    second = default_probes(ops)
    assert len(first) == 2 * 3 + 10
    assert all(np.array_equal(a.matrix, b.matrix) for a, b in zip(first, second))


def test_fluctuation_ratio_values(make_config):
    config = make_config(**QUASISTATIC_ENGINE)
    ratio = fluctuation_ratio(report_with(2.0, 2.0), config)
    assert ratio.bound == pytest.approx((1 / 6) ** 2)
    assert ratio.eta2 == 1.0
    assert ratio.violated
    assert ratio.ratio == pytest.approx(36.0)


def test_fluctuation_ratio_undefined_without_heat_noise(make_config):
    ratio = fluctuation_ratio(report_with(1.0, 1e-16), make_config())
    assert ratio.eta2 is None
    assert ratio.violated is None
    assert ratio.ratio is None


@pytest.mark.parametrize("scheme", list(Scheme))
def test_bound_is_violated_at_weak_thermalization(make_config, scheme):
    config = make_config(**QUASISTATIC_ENGINE, **{"lambda": 0.01})
    ops, corners = solve(config)
    assert fluctuation_ratio(closed_form_report(scheme, corners, ops, config), config).violated
