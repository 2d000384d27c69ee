from dataclasses import dataclass
from typing import Iterable, Tuple

import numpy as np
from numpy.typing import NDArray

from qcore.errors import NormalizationError

DROP_MASS = 1e-15
NORMALIZATION_TOL = 1e-10


def merge_clusters(values: np.ndarray, weights: np.ndarray, tol: float) -> Tuple[np.ndarray, np.ndarray]:
    """Сливает значения, отстоящие от соседа не более чем на tol.
    Значение кластера равно среднему с весами по суммарной массе атомов;
    кластер без массы получает своё наименьшее значение.
    :param values: Значения атомов.
    :param weights: Массы атомов, форма (n,) или (n, k).
    :param tol: Допуск слияния.
    :return tuple: (значения кластеров по возрастанию, суммарные массы кластеров).
    """
    values = np.asarray(values, dtype=np.float64)
    weights = np.asarray(weights, dtype=np.float64)
    if values.shape[0] == 0:
        return values, weights
    order = np.argsort(values, kind="stable")
    values, weights = values[order], weights[order]
    starts = np.concatenate([[True], np.diff(values) > tol])
    labels = np.cumsum(starts) - 1
    count = int(labels[-1]) + 1

    flat = weights.reshape(weights.shape[0], -1)
    merged = np.zeros((count, flat.shape[1]))
    np.add.at(merged, labels, flat)

    mass = flat.sum(axis=1)
    cluster_mass = np.zeros(count)
    np.add.at(cluster_mass, labels, mass)
    weighted = np.zeros(count)
    np.add.at(weighted, labels, values * mass)
    first = np.zeros(count)
    first[labels[::-1]] = values[::-1]
    centers = np.where(cluster_mass > 0, weighted / np.where(cluster_mass > 0, cluster_mass, 1.0), first)
    return centers, merged.reshape((count,) + weights.shape[1:])


@dataclass(frozen=True)
class DiscreteDistribution:
    """Конечное распределение значений работы или теплоты.
    Сумма вероятностей проверяется при создании с допуском 1e-10.
    """

    values: NDArray[np.float64]
    probabilities: NDArray[np.float64]
    merge_tol: float = 1e-9

    def __post_init__(self) -> None:
        total = float(np.sum(self.probabilities))
        if abs(total - 1.0) > NORMALIZATION_TOL:
            raise NormalizationError(f"распределение не нормировано: сумма вероятностей {total:.15g}")

    @classmethod
    def from_atoms(
        cls, values: Iterable[float], probabilities: Iterable[float], merge_tol: float = 1e-9
    ) -> "DiscreteDistribution":
        """Строит распределение, сливая близкие значения и отбрасывая атомы с массой ≤ 1e-15."""
        values = np.asarray(list(values), dtype=np.float64)
        probabilities = np.asarray(list(probabilities), dtype=np.float64)
        probabilities = np.where(probabilities < 0.0, 0.0, probabilities)
        centers, masses = merge_clusters(values.ravel(), probabilities.ravel(), merge_tol)
        keep = masses > DROP_MASS
        return cls(centers[keep], masses[keep], merge_tol)

    def __len__(self) -> int:
        return self.values.shape[0]

    @property
    def total(self) -> float:
        return float(np.sum(self.probabilities))

    def atoms(self) -> list:
        return list(zip(self.values.tolist(), self.probabilities.tolist()))
