from enum import Enum
from typing import Dict, Sequence, Tuple

import numpy as np

from measurement_stats.joints import OutcomeJoint, marginals
from qcore.distribution import DiscreteDistribution
from qcore.operators import SpectralDecomposition


class QuantityKind(str, Enum):
    WORK = "work"
    HEAT_H = "heat_h"
    HEAT_C = "heat_c"


def value_distribution(
    kind: QuantityKind,
    marginal: np.ndarray,
    corner_bases: Sequence[SpectralDecomposition],
    merge_tol: float = 1e-9,
) -> DiscreteDistribution:
    """Распределение работы или теплоты по соответствующему маргиналу.
    w = e_e^j − e_k^l + e_k^m − e_e^n, q_h = e_k^m − e_k^l, q_c = e_e^r − e_e^n.
    :param kind: Величина.
    :param marginal: Маргинал (j, l, m, n) для работы, (l, m) или (n, r) для теплот.
    :param corner_bases: Пять энергетических базисов точек измерения.
    :param merge_tol: Допуск слияния значений.
    :return DiscreteDistribution: Распределение с объединёнными совпадающими значениями.
    """
    energies = [basis.eigenvalues for basis in corner_bases]
    kind = QuantityKind(kind)
    if kind is QuantityKind.WORK:
        e1, e2, e3, e4 = np.meshgrid(*energies[:4], indexing="ij")
        values = e1 - e2 + e3 - e4
    elif kind is QuantityKind.HEAT_H:
        before, after = np.meshgrid(energies[1], energies[2], indexing="ij")
        values = after - before
    else:
        before, after = np.meshgrid(energies[3], energies[4], indexing="ij")
        values = after - before
    if values.shape != marginal.shape:
        raise ValueError(f"форма маргинала {marginal.shape} не совпадает с числом уровней {values.shape}")
    return DiscreteDistribution.from_atoms(values.ravel(), np.asarray(marginal).ravel(), merge_tol)


def joint_distributions(joint: OutcomeJoint, merge_tol: float = 1e-9) -> Dict[QuantityKind, DiscreteDistribution]:
    """Распределения работы и обеих теплот из одного совместного распределения."""
    tables = dict(zip(QuantityKind, marginals(joint)))
    return {kind: value_distribution(kind, table, joint.corner_bases, merge_tol) for kind, table in tables.items()}


def moments(dist: DiscreteDistribution) -> Tuple[float, float]:
    mean = float(np.sum(dist.values * dist.probabilities))
    variance = float(np.sum((dist.values - mean) ** 2 * dist.probabilities))
    return mean, max(0.0, variance)
