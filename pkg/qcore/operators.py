from dataclasses import dataclass
from typing import Tuple

import numpy as np
from numpy.typing import NDArray

from qcore.errors import (
    DimensionMismatchError,
    InvalidDimensionError,
    InvalidStateError,
    NotHermitianError,
)

ComplexMatrix = NDArray[np.complex128]

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
POSITIVITY_TOL = 1e-12
INPUT_HERMITIAN_TOL = 1e-10


def as_matrix(values) -> ComplexMatrix:
    """Приводит вход к квадратной комплексной матрице размерности ≥ 2.
    :param values: Массив или вложенный список.
    :return ComplexMatrix: Копия в виде complex128.
    """
    matrix = np.array(values, dtype=np.complex128)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise InvalidDimensionError(f"ожидалась квадратная матрица, получена форма {matrix.shape}")
    if matrix.shape[0] < 2:
        raise InvalidDimensionError(f"размерность должна быть ≥ 2, получено {matrix.shape[0]}")
    return matrix


def hermiticity_defect(matrix: ComplexMatrix) -> float:
    return float(np.max(np.abs(matrix - matrix.conj().T)))


def conjugate(unitary: ComplexMatrix, operator: ComplexMatrix) -> ComplexMatrix:
    """U X U†."""
    return unitary @ operator @ unitary.conj().T


@dataclass(frozen=True)
class DensityMatrix:
    """Состояние рабочего тела: эрмитова, положительная матрица с единичным следом."""

    matrix: ComplexMatrix

    def __post_init__(self) -> None:
        matrix = as_matrix(self.matrix)
        if hermiticity_defect(matrix) > HERMITIAN_TOL:
            raise InvalidStateError(f"матрица плотности не эрмитова: дефект {hermiticity_defect(matrix):.3e}")
        trace = np.trace(matrix)
        if abs(trace - 1.0) > TRACE_TOL:
            raise InvalidStateError(f"след матрицы плотности равен {trace.real:.15g}, а не 1")
        smallest = float(np.linalg.eigvalsh(0.5 * (matrix + matrix.conj().T))[0])
        if smallest < -POSITIVITY_TOL:
            raise InvalidStateError(f"матрица плотности не положительна: λ_min = {smallest:.3e}")
        matrix.setflags(write=False)
        object.__setattr__(self, "matrix", matrix)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @classmethod
    def maximally_mixed(cls, d: int) -> "DensityMatrix":
        return cls(np.eye(d, dtype=np.complex128) / d)

    @classmethod
    def pure(cls, vector) -> "DensityMatrix":
        ket = np.asarray(vector, dtype=np.complex128)
        ket = ket / np.linalg.norm(ket)
        return cls(np.outer(ket, ket.conj()))

    @classmethod
    def from_hermitian_part(cls, matrix: ComplexMatrix) -> "DensityMatrix":
        """Симметризует результат вычислений, накопивших ошибку округления."""
        matrix = np.asarray(matrix, dtype=np.complex128)
        return cls(0.5 * (matrix + matrix.conj().T))


@dataclass(frozen=True)
class SpectralDecomposition:
    """Собственные значения по возрастанию и проекторы на их собственные подпространства.
    Значения различны, кроме разложений с дроблением по энергии для измерений DBN.
    """

    eigenvalues: NDArray[np.float64]
    projectors: NDArray[np.complex128]
    grouping_tol: float

    def __post_init__(self) -> None:
        eigenvalues = np.asarray(self.eigenvalues, dtype=np.float64)
        projectors = np.asarray(self.projectors, dtype=np.complex128)
        if projectors.ndim != 3 or projectors.shape[0] != eigenvalues.shape[0]:
            raise DimensionMismatchError("число проекторов не совпадает с числом собственных значений")
        eigenvalues.setflags(write=False)
        projectors.setflags(write=False)
        object.__setattr__(self, "eigenvalues", eigenvalues)
        object.__setattr__(self, "projectors", projectors)

    def __len__(self) -> int:
        return self.eigenvalues.shape[0]

    @property
    def dim(self) -> int:
        return self.projectors.shape[1]

    @property
    def ranks(self) -> NDArray[np.float64]:
        return np.real(np.trace(self.projectors, axis1=1, axis2=2))

    def reconstruct(self) -> ComplexMatrix:
        return np.einsum("a,aij->ij", self.eigenvalues, self.projectors)

    def operator_power(self, power: int) -> ComplexMatrix:
        return np.einsum("a,aij->ij", self.eigenvalues**power, self.projectors)


def spin_operators(d: int) -> Tuple[ComplexMatrix, ComplexMatrix, ComplexMatrix]:
    """Матрицы момента импульса для спина j = (d − 1)/2 в базисе S_z (m = j, j − 1, …, −j).
    :param d: Размерность гильбертова пространства.
    :return tuple: (Sx, Sy, Sz).
    """
    if int(d) != d or d < 2:
        raise InvalidDimensionError(f"размерность спина должна быть целой и ≥ 2, получено {d}")
    d = int(d)
    j = (d - 1) / 2.0
    m = j - np.arange(d)
    raising = np.zeros((d, d), dtype=np.complex128)
    for i in range(1, d):
        # S+ |m_i> = sqrt(j(j+1) − m_i(m_i+1)) |m_i + 1>
        raising[i - 1, i] = np.sqrt(j * (j + 1) - m[i] * (m[i] + 1))
    lowering = raising.conj().T
    sx = 0.5 * (raising + lowering)
    sy = -0.5j * (raising - lowering)
    sz = np.diag(m).astype(np.complex128)
    return sx, sy, sz


def eig_hermitian(operator, grouping_tol: float = 1e-9) -> SpectralDecomposition:
    """Спектральное разложение эрмитова оператора с объединением вырожденных уровней.
    Соседние собственные значения, отличающиеся не более чем на grouping_tol,
    объединяются в одно подпространство с общим проектором ранга k.
    :param operator: Эрмитова матрица.
    :param grouping_tol: Порог объединения собственных значений.
    :return SpectralDecomposition: Разложение с собственными значениями по возрастанию.
    """
    matrix = as_matrix(operator)
    defect = hermiticity_defect(matrix)
    if defect > INPUT_HERMITIAN_TOL:
        raise NotHermitianError(f"оператор не эрмитов: max|H − H†| = {defect:.3e}")
    values, vectors = np.linalg.eigh(0.5 * (matrix + matrix.conj().T))

    groups = [[0]]
    for index in range(1, values.shape[0]):
        if values[index] - values[groups[-1][-1]] <= grouping_tol:
            groups[-1].append(index)
        else:
            groups.append([index])

    eigenvalues = np.array([values[group].mean() for group in groups])
    projectors = np.array([vectors[:, group] @ vectors[:, group].conj().T for group in groups])
    return SpectralDecomposition(eigenvalues, projectors, grouping_tol)


def check_same_dimension(*dims: int) -> None:
    if len(set(dims)) != 1:
        raise DimensionMismatchError(f"размерности не совпадают: {dims}")
