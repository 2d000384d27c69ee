import math

import numpy as np
from scipy.special import entr, rel_entr

from qcore.distribution import DiscreteDistribution, merge_clusters
from qcore.operators import (
    ComplexMatrix,
    DensityMatrix,
    SpectralDecomposition,
    check_same_dimension,
)

ZERO_EIGENVALUE = 1e-14
KL_MASS_FLOOR = 1e-12


def dephase_matrix(matrix: ComplexMatrix, projectors: np.ndarray) -> ComplexMatrix:
    """Σ_a P_a X P_a для произвольного оператора или пачки операторов (..., d, d)."""
    return np.einsum("aij,...jk,akl->...il", projectors, matrix, projectors)


def dephase(rho: DensityMatrix, basis: SpectralDecomposition) -> DensityMatrix:
    """Дефазировка в базисе собственных подпространств.
    :param rho: Состояние.
    :param basis: Полный набор проекторов той же размерности.
    :return DensityMatrix: Σ_a P_a ρ P_a.
    """
    check_same_dimension(rho.dim, basis.dim)
    return DensityMatrix.from_hermitian_part(dephase_matrix(rho.matrix, basis.projectors))


def trace_distance(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    check_same_dimension(rho.dim, sigma.dim)
    singular = np.linalg.svd(rho.matrix - sigma.matrix, compute_uv=False)
    return float(min(1.0, 0.5 * np.sum(singular)))


def entropy_of_spectrum(eigenvalues: np.ndarray) -> float:
    probabilities = np.where(eigenvalues < ZERO_EIGENVALUE, 0.0, eigenvalues)
    return float(np.sum(entr(probabilities)))


def von_neumann_entropy(rho: DensityMatrix) -> float:
    """S(ρ) = −tr ρ ln ρ, собственные значения ниже 1e-14 считаются нулевыми."""
    return entropy_of_spectrum(np.linalg.eigvalsh(rho.matrix))


def rel_entropy_coherence(rho: DensityMatrix, basis: SpectralDecomposition) -> float:
    """Относительная энтропия когерентности C(ρ) = S(D(ρ)) − S(ρ) в заданном базисе."""
    value = von_neumann_entropy(dephase(rho, basis)) - von_neumann_entropy(rho)
    return max(0.0, value)


def kl_divergence(p: DiscreteDistribution, q: DiscreteDistribution) -> float:
    """Расхождение Кульбака-Лейблера D(P‖Q) в натуральных логарифмах.
    Носители объединяются по значениям с допуском max(merge_tol).
    Если у P есть атом с вероятностью > 1e-12 там, где у Q нет массы, возвращается math.inf.
    :param p: Нормированное распределение P.
    :param q: Нормированное распределение Q.
    :return float: D(P‖Q) ≥ 0 или math.inf.
    """
    tol = max(p.merge_tol, q.merge_tol)
    values = np.concatenate([p.values, q.values])
    masses = np.zeros((values.shape[0], 2))
    masses[: len(p), 0] = p.probabilities
    masses[len(p) :, 1] = q.probabilities
    _, merged = merge_clusters(values, masses, tol)

    p_mass, q_mass = merged[:, 0], merged[:, 1]
    unsupported = (q_mass <= 0.0) & (p_mass > KL_MASS_FLOOR)
    if np.any(unsupported):
        return math.inf
    supported = q_mass > 0.0
    value = float(np.sum(rel_entr(p_mass[supported], q_mass[supported])))
    return max(0.0, value)
