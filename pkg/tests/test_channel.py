import math

import numpy as np
import pytest

from engine.channel import apply_gad, gad_channel, gibbs_state, level_populations
from qcore.errors import BasisMismatchError
from qcore.metrics import dephase
from qcore.operators import DensityMatrix, eig_hermitian, spin_operators
from qcore.random import random_density_matrix, random_diagonal_state


def thermal_setup(d, omega=2.0, temperature=1.5):
    basis = eig_hermitian(omega * spin_operators(d)[2])
    return basis, gibbs_state(basis, temperature)


def test_gibbs_state_two_level():
    basis, sigma = thermal_setup(2, omega=10.0, temperature=14.0)
    weights = np.array([math.exp(-5 / 14), math.exp(5 / 14)])
    assert np.allclose(np.diag(sigma.matrix).real, weights / weights.sum())
    assert np.allclose(sigma.matrix, np.diag(np.diag(sigma.matrix)))


def test_gibbs_state_rejects_non_positive_temperature():
    basis, _ = thermal_setup(2)
    with pytest.raises(ValueError):
        gibbs_state(basis, 0.0)


def test_zero_rate_is_identity(rng):
    basis, sigma = thermal_setup(3)
    rho = random_density_matrix(3, rng)
    assert np.allclose(gad_channel(rho, 0.0, sigma, basis).matrix, rho.matrix)


def test_unit_rate_collapses_to_fixed_point(rng):
    basis, sigma = thermal_setup(4)
    rho = random_density_matrix(4, rng)
    assert np.allclose(gad_channel(rho, 1.0, sigma, basis).matrix, sigma.matrix, atol=1e-12)


def test_diagonal_input_mixes_populations():
    basis = eig_hermitian(spin_operators(2)[2])
    output = gad_channel(DensityMatrix(np.diag([1.0, 0.0])), 0.5, DensityMatrix(np.diag([0.25, 0.75])), basis)
    assert np.allclose(output.matrix, np.diag([0.625, 0.375]))


@pytest.mark.parametrize("lam", [0.1, 0.5, 0.9])
def test_qubit_coherence_damping_factor(rng, lam):
    basis, sigma = thermal_setup(2)
    rho = random_density_matrix(2, rng)
    output = gad_channel(rho, lam, sigma, basis)
    assert abs(output.matrix[0, 1] - math.sqrt(1 - lam) * rho.matrix[0, 1]) < 1e-10


@pytest.mark.parametrize("d", [3, 4])
def test_qudit_coherence_damping_factor(rng, d):
    basis, sigma = thermal_setup(d)
    lam = 0.4
    s = math.sqrt(1 - lam)
    rho = random_density_matrix(d, rng)
    output = gad_channel(rho, lam, sigma, basis).matrix
    # вычислительный базис S_z упорядочен по убыванию энергии
    populations = level_populations(sigma.matrix, basis)[::-1]
    for a in range(d):
        for b in range(d):
            if a != b:
                factor = s * s + s * (1 - s) * (populations[a] + populations[b])
                assert abs(output[a, b] - factor * rho.matrix[a, b]) < 1e-10


def test_channel_is_trace_and_positivity_preserving(rng):
    for d in (2, 3, 4):
        basis, sigma = thermal_setup(d, omega=float(rng.uniform(0.5, 5.0)), temperature=float(rng.uniform(0.2, 5.0)))
        for lam in rng.uniform(0.0, 1.0, size=5):
            output = gad_channel(random_density_matrix(d, rng), float(lam), sigma, basis).matrix
            assert np.isclose(np.trace(output).real, 1.0, atol=1e-12)
            assert np.linalg.eigvalsh(output).min() > -1e-10


def test_channel_commutes_with_dephasing(rng):
    basis, sigma = thermal_setup(3)
    rho = random_density_matrix(3, rng)
    left = dephase(gad_channel(rho, 0.3, sigma, basis), basis)
    right = gad_channel(dephase(rho, basis), 0.3, sigma, basis)
    assert np.allclose(left.matrix, right.matrix, atol=1e-10)


def test_fixed_point_is_preserved():
    basis, sigma = thermal_setup(3)
    assert np.allclose(gad_channel(sigma, 0.37, sigma, basis).matrix, sigma.matrix, atol=1e-12)


def test_incoherent_states_stay_incoherent(rng):
    basis, sigma = thermal_setup(4)
    rho = random_diagonal_state(basis, rng)
    output = gad_channel(rho, 0.6, sigma, basis).matrix
    assert np.allclose(output, np.diag(np.diag(output)), atol=1e-12)


def test_apply_gad_acts_on_batches(rng):
    basis, sigma = thermal_setup(3)
    populations = level_populations(sigma.matrix, basis)
    batch = np.stack([random_density_matrix(3, rng).matrix for _ in range(4)])
    together = apply_gad(batch, 0.25, sigma.matrix, basis, populations)
    for item, output in zip(batch, together):
        assert np.allclose(apply_gad(item, 0.25, sigma.matrix, basis, populations), output)


def test_channel_rejects_non_diagonal_fixed_point(rng):
    basis, _ = thermal_setup(2)
    with pytest.raises(BasisMismatchError):
        gad_channel(DensityMatrix.maximally_mixed(2), 0.5, DensityMatrix.pure([1.0, 1.0]), basis)


def test_channel_rejects_rate_out_of_range():
    basis, sigma = thermal_setup(2)
    with pytest.raises(ValueError):
        gad_channel(sigma, 1.5, sigma, basis)
