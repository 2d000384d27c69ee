import numpy as np
import pytest
from scipy.linalg import expm

from engine.protocol import DrivingProtocol, fixed_step_propagator, propagator
from qcore.errors import ConvergenceError
from qcore.operators import spin_operators


def test_protocol_endpoints():
    protocol = DrivingProtocol(0.5, 10.0, 9.0, 2.0)
    assert protocol.omega(0.0) == 0.5
    assert np.isclose(protocol.omega(2.0), 10.0)
    assert protocol.g(0.0) == 0.0
    assert abs(protocol.g(2.0)) < 1e-12
    assert np.isclose(protocol.g(1.0), 9.0)


def test_protocol_rejects_non_positive_duration():
    with pytest.raises(ValueError):
        DrivingProtocol(0.5, 10.0, 9.0, 0.0)


@pytest.mark.parametrize("d", [2, 3, 4])
def test_propagator_is_unitary(d):
    sx, _, sz = spin_operators(d)
    u = propagator(DrivingProtocol(0.5, 10.0, 9.0, 1.0), sx, sz, tol=1e-8)
    assert np.max(np.abs(u.conj().T @ u - np.eye(d))) < 1e-10


def test_undriven_propagator_closed_form():
    sx, _, sz = spin_operators(3)
    protocol = DrivingProtocol(0.5, 10.0, 0.0, 1.0)
    phase = (0.5 + 10.0) * 1.0 / 2
    expected = np.diag(np.exp(-1j * phase * np.diag(sz).real))
    assert np.allclose(propagator(protocol, sx, sz), expected, atol=1e-10)


def test_fixed_step_product_is_time_ordered():
    sx, _, sz = spin_operators(2)
    protocol = DrivingProtocol(1.0, 4.0, 3.0, 1.5)
    steps = 7
    dt = protocol.duration / steps
    expected = np.eye(2, dtype=complex)
    for k in range(steps):
        t = (k + 0.5) * dt
        expected = expm(-1j * dt * (protocol.omega(t) * sz + protocol.g(t) * sx)) @ expected
    assert np.allclose(fixed_step_propagator(protocol, sx, sz, steps), expected, atol=1e-12)


def test_fixed_step_rejects_single_step():
    sx, _, sz = spin_operators(2)
    with pytest.raises(ValueError):
        fixed_step_propagator(DrivingProtocol(1.0, 2.0, 1.0, 1.0), sx, sz, 1)


def test_midpoint_scheme_is_second_order():
    sx, _, sz = spin_operators(3)
    protocol = DrivingProtocol(0.5, 10.0, 9.0, 1.0)
    reference = fixed_step_propagator(protocol, sx, sz, 1024)
    coarse = np.max(np.abs(fixed_step_propagator(protocol, sx, sz, 64) - reference))
    fine = np.max(np.abs(fixed_step_propagator(protocol, sx, sz, 128) - reference))
    assert 1.7 <= np.log2(coarse / fine) <= 2.3


def test_step_doubling_self_consistency():
    sx, _, sz = spin_operators(2)
    protocol = DrivingProtocol(0.5, 10.0, 9.0, 1.0)
    loose = propagator(protocol, sx, sz, tol=1e-8)
    tight = propagator(protocol, sx, sz, tol=1e-10)
    assert np.max(np.abs(loose - tight)) < 1e-8


def test_propagator_reports_non_convergence():
    sx, _, sz = spin_operators(2)
    with pytest.raises(ConvergenceError) as error:
        propagator(DrivingProtocol(0.5, 10.0, 9.0, 1.0), sx, sz, steps=2, tol=1e-14, max_steps=16)
    assert error.value.achieved > 1e-14
