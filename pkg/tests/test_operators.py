import numpy as np
import pytest

from qcore.distribution import DiscreteDistribution, merge_clusters
from qcore.errors import InvalidDimensionError, InvalidStateError, NormalizationError, NotHermitianError
from qcore.operators import DensityMatrix, eig_hermitian, spin_operators
from qcore.random import random_degenerate_hermitian, random_hermitian


@pytest.mark.parametrize("d", [2, 3, 4, 5])
def test_spin_operators_commutation(d):
    sx, sy, sz = spin_operators(d)
    assert np.allclose(sx @ sy - sy @ sx, 1j * sz)
    j = (d - 1) / 2
    assert np.allclose(sx @ sx + sy @ sy + sz @ sz, j * (j + 1) * np.eye(d))


def test_spin_half_sz_order():
    _, _, sz = spin_operators(2)
    assert np.allclose(sz, np.diag([0.5, -0.5]))


def test_spin_operators_reject_small_dimension():
    with pytest.raises(InvalidDimensionError):
        spin_operators(1)


def test_density_matrix_rejects_invalid_states():
    with pytest.raises(InvalidStateError):
        DensityMatrix(np.array([[0.5, 0.1], [0.0, 0.5]]))
    with pytest.raises(InvalidStateError):
        DensityMatrix(np.diag([0.6, 0.6]))
    with pytest.raises(InvalidStateError):
        DensityMatrix(np.diag([1.5, -0.5]))
    with pytest.raises(InvalidDimensionError):
        DensityMatrix(np.ones((2, 3)) / 2)


def test_density_matrix_is_read_only():
    rho = DensityMatrix.maximally_mixed(3)
    with pytest.raises(ValueError):
        rho.matrix[0, 0] = 1.0


def test_pure_state_is_normalized():
    rho = DensityMatrix.pure([1.0, 1.0j])
    assert np.isclose(np.trace(rho.matrix).real, 1.0)
    assert np.allclose(rho.matrix @ rho.matrix, rho.matrix)


def test_eig_hermitian_reconstructs_random_operator(rng):
    for d in (2, 3, 4, 6):
        h = random_hermitian(d, rng)
        decomposition = eig_hermitian(h)
        assert np.allclose(decomposition.reconstruct(), h, atol=1e-10)
        assert np.allclose(decomposition.projectors.sum(axis=0), np.eye(d), atol=1e-10)
        assert np.all(np.diff(decomposition.eigenvalues) > 0)


def test_eig_hermitian_groups_degenerate_levels(rng):
    h = random_degenerate_hermitian(4, rng)
    decomposition = eig_hermitian(h)
    assert len(decomposition) == 3
    assert np.allclose(decomposition.ranks, [2, 1, 1])
    assert np.allclose(decomposition.reconstruct(), h, atol=1e-10)
    assert np.allclose(decomposition.projectors.sum(axis=0), np.eye(4), atol=1e-10)


def test_eig_hermitian_grouping_tolerance():
    decomposition = eig_hermitian(np.diag([0.0, 1e-10, 1.0]))
    assert len(decomposition) == 2
    assert np.allclose(decomposition.ranks, [2, 1])
    assert len(eig_hermitian(np.diag([0.0, 1e-10, 1.0]), grouping_tol=1e-12)) == 3


def test_eig_hermitian_rejects_non_hermitian():
    with pytest.raises(NotHermitianError):
        eig_hermitian(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_operator_power_matches_matrix_power(rng):
    h = random_hermitian(3, rng)
    decomposition = eig_hermitian(h)
    assert np.allclose(decomposition.operator_power(2), h @ h, atol=1e-10)


def test_merge_clusters_sums_masses():
    centers, masses = merge_clusters(np.array([1.0, 2.0, 1.0 + 5e-10]), np.array([0.25, 0.5, 0.25]), 1e-9)
    assert np.allclose(masses, [0.5, 0.5])
    assert np.isclose(centers[0], 1.0 + 2.5e-10)
    assert centers[1] == 2.0


def test_distribution_from_atoms_merges_and_drops():
    dist = DiscreteDistribution.from_atoms([1.0, 1.0 + 5e-10, 3.0, 7.0], [0.3, 0.2, 0.5, 1e-16])
    assert len(dist) == 2
    assert np.allclose(dist.probabilities, [0.5, 0.5])
    assert np.isclose(dist.total, 1.0)


def test_distribution_clamps_negative_round_off():
    dist = DiscreteDistribution.from_atoms([0.0, 1.0], [1.0, -1e-13])
    assert dist.atoms() == [(0.0, 1.0)]


def test_distribution_rejects_unnormalized_atoms():
    with pytest.raises(NormalizationError):
        DiscreteDistribution.from_atoms([0.0], [0.9])
    with pytest.raises(NormalizationError):
        DiscreteDistribution(np.array([0.0, 1.0]), np.array([0.5, 0.5 + 1e-9]))
    assert DiscreteDistribution.from_atoms([0.0, 1.0], [0.5, 0.5 + 1e-12]).total > 1.0
