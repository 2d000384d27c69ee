import numpy as np

from qcore.errors import BasisMismatchError
from qcore.metrics import dephase_matrix
from qcore.operators import (
    ComplexMatrix,
    DensityMatrix,
    SpectralDecomposition,
    check_same_dimension,
)

DIAGONALITY_TOL = 1e-10


def gibbs_state(hamiltonian: SpectralDecomposition, temperature: float) -> DensityMatrix:
    """Состояние Гиббса exp(−H/T)/Z, построенное по спектральному разложению H.
    :param hamiltonian: Разложение гамильтониана.
    :param temperature: Температура резервуара (k_B = 1).
    :return DensityMatrix: Диагональное в базисе H состояние.
    """
    if not temperature > 0:
        raise ValueError(f"температура должна быть положительной, получено {temperature}")
    weights = np.exp(-(hamiltonian.eigenvalues - hamiltonian.eigenvalues.min()) / temperature)
    weights = weights / np.sum(weights * hamiltonian.ranks)
    return DensityMatrix.from_hermitian_part(np.einsum("a,aij->ij", weights, hamiltonian.projectors))


def level_populations(sigma: ComplexMatrix, basis: SpectralDecomposition) -> np.ndarray:
    """p_j = tr(Π_j σ)/tr(Π_j), собственные значения σ на подпространствах базиса."""
    return np.real(np.einsum("aij,ji->a", basis.projectors, sigma)) / basis.ranks


def check_diagonal(sigma: ComplexMatrix, basis: SpectralDecomposition) -> None:
    defect = float(np.max(np.abs(sigma - dephase_matrix(sigma, basis.projectors))))
    if defect > DIAGONALITY_TOL:
        raise BasisMismatchError(f"неподвижная точка канала не диагональна в базисе: дефект {defect:.3e}")


def apply_gad(
    operator: ComplexMatrix,
    lam: float,
    sigma: ComplexMatrix,
    basis: SpectralDecomposition,
    populations: np.ndarray,
) -> ComplexMatrix:
    """Обобщённое амплитудное затухание как линейное отображение произвольного оператора X:
    (1 − λ)X + λσ·tr X − 2s(1 − s)·Σ_j p_j (Π_j X Π_j − {Π_j, X}/2), s = √(1 − λ).
    Принимает и пачки операторов формы (..., d, d).
    """
    operator = np.asarray(operator, dtype=np.complex128)
    if lam == 0.0:
        return operator.copy()
    trace = np.trace(operator, axis1=-2, axis2=-1)[..., None, None]
    if lam == 1.0:
        return trace * sigma
    s = np.sqrt(1.0 - lam)
    projectors = basis.projectors
    sandwiched = np.einsum("a,aij,...jk,akl->...il", populations, projectors, operator, projectors)
    weighted = np.einsum("a,aij->ij", populations, projectors)
    dissipator = sandwiched - 0.5 * (weighted @ operator + operator @ weighted)
    return (1.0 - lam) * operator + lam * trace * sigma - 2.0 * s * (1.0 - s) * dissipator


def gad_channel(rho: DensityMatrix, lam: float, sigma: DensityMatrix, basis: SpectralDecomposition) -> DensityMatrix:
    """Термализация с неподвижной точкой σ и скоростью λ ∈ [0, 1].
    :param rho: Входное состояние.
    :param lam: Скорость термализации; 0 - тождественный канал, 1 - полная замена на σ.
    :param sigma: Неподвижная точка канала, диагональная в basis.
    :param basis: Собственный базис гамильтониана резервуарного хода.
    :return DensityMatrix: Выходное состояние.
    """
    if not 0.0 <= lam <= 1.0:
        raise ValueError(f"скорость термализации должна лежать в [0, 1], получено {lam}")
    check_same_dimension(rho.dim, sigma.dim, basis.dim)
    check_diagonal(sigma.matrix, basis)
    populations = level_populations(sigma.matrix, basis)
    output = apply_gad(rho.matrix, lam, sigma.matrix, basis, populations)
    return DensityMatrix.from_hermitian_part(output)
