from dataclasses import dataclass
from enum import Enum
from typing import List, Tuple

import numpy as np

from config_data.cycle import CycleConfig
from engine.cycle import CycleCorners, CycleOperators, stroke_maps
from qcore.errors import NormalizationError
from qcore.operators import SpectralDecomposition, eig_hermitian

NEGATIVE_TOL = 1e-12
NORMALIZATION_TOL = 1e-10
ZERO_BRANCH = 1e-14
COMMUTATION_TOL = 1e-12


class Scheme(str, Enum):
    TPM = "tpm"
    DBN = "dbn"


@dataclass(frozen=True)
class OutcomeJoint:
    """Совместное распределение исходов (j, l, m, n, r) пяти энергетических измерений."""

    scheme: Scheme
    probabilities: np.ndarray
    corner_bases: Tuple[SpectralDecomposition, ...]

    def __post_init__(self) -> None:
        table = np.real(np.asarray(self.probabilities)).astype(np.float64)
        if table.ndim != 5 or len(self.corner_bases) != 5:
            raise NormalizationError("совместное распределение должно иметь пять индексов")
        if table.min() < -NEGATIVE_TOL:
            raise NormalizationError(f"отрицательная вероятность {table.min():.3e}")
        table = np.where(table < 0.0, 0.0, table)
        total = table.sum()
        if abs(total - 1.0) > NORMALIZATION_TOL:
            raise NormalizationError(f"совместное распределение не нормировано: сумма {total:.15g}")
        table.setflags(write=False)
        object.__setattr__(self, "probabilities", table)

    @property
    def dims(self) -> Tuple[int, ...]:
        return self.probabilities.shape


def energy_bases(ops: CycleOperators) -> Tuple[SpectralDecomposition, ...]:
    """Базисы измерений в пяти точках: H_e, H_k, H_k, H_e, H_e."""
    return ops.h_e, ops.h_k, ops.h_k, ops.h_e, ops.h_e


def _project(batch: np.ndarray, projectors: np.ndarray) -> np.ndarray:
    # (..., d, d) -> (..., k, d, d)
    return np.einsum("kab,...bc,kcd->...kad", projectors, batch, projectors)


def tpm_joint(corners: CycleCorners, ops: CycleOperators, config: CycleConfig) -> OutcomeJoint:
    """Схема двух точечных измерений: пять последовательных проективных измерений энергии на одной копии.
    Ненормированные состояния после каждого префикса исходов переиспользуются для всех продолжений.
    """
    compression, hot_isochore, expansion, cold_isochore = stroke_maps(ops, config)
    e1, e2, e3, e4, e5 = energy_bases(ops)

    branches = _project(corners.rho1.matrix, e1.projectors)
    branches = _project(compression(branches), e2.projectors)
    branches = _project(hot_isochore(branches), e3.projectors)
    branches = _project(expansion(branches), e4.projectors)
    table = np.real(np.einsum("rab,jlmnba->jlmnr", e5.projectors, cold_isochore(branches)))
    return OutcomeJoint(Scheme.TPM, table, energy_bases(ops))


@dataclass(frozen=True)
class BayesianNetwork:
    """Измерения в собственных базисах углового состояния цикла.
    weights[i][α] = tr(P_i^α ρ_i); posts[i] - нормированные состояния после измерения (нулевые для пустых ветвей);
    transfers[i][α, β] - вероятность перехода к исходу β в следующей точке; conditionals[i][α, e] = tr(Π_e ς_i^α).
    """

    decompositions: Tuple[SpectralDecomposition, ...]
    weights: Tuple[np.ndarray, ...]
    posts: Tuple[np.ndarray, ...]
    transfers: Tuple[np.ndarray, ...]
    conditionals: Tuple[np.ndarray, ...]


def _post_measurement(state: np.ndarray, basis: SpectralDecomposition) -> Tuple[np.ndarray, np.ndarray]:
    projected = _project(state, basis.projectors)
    weights = np.real(np.trace(projected, axis1=-2, axis2=-1))
    live = weights >= ZERO_BRANCH
    posts = np.zeros_like(projected)
    posts[live] = projected[live] / weights[live][:, None, None]
    return np.where(live, weights, 0.0), posts


def corner_decomposition(state: np.ndarray, energy: SpectralDecomposition, grouping_tol: float) -> SpectralDecomposition:
    """Собственный базис углового состояния для измерения DBN.
    Если состояние коммутирует с гамильтонианом своей точки, вырожденные собственные подпространства
    дробятся проекторами энергии P^α Π^e: это тоже собственный базис состояния, и он сохраняет
    корреляции энергий между копиями.
    :param state: Угловое состояние.
    :param energy: Спектральное разложение гамильтониана в этой точке.
    :param grouping_tol: Порог объединения собственных значений.
    :return SpectralDecomposition: Проекторы измерения; собственные значения могут повторяться.
    """
    basis = eig_hermitian(state, grouping_tol)
    if np.all(basis.ranks < 1.5):
        return basis
    hamiltonian = energy.reconstruct()
    commutator = state @ hamiltonian - hamiltonian @ state
    if np.max(np.abs(commutator)) > COMMUTATION_TOL * max(1.0, float(np.max(np.abs(hamiltonian)))):
        return basis

    products = np.einsum("aij,ejk->aeik", basis.projectors, energy.projectors)
    products = 0.5 * (products + np.conj(np.swapaxes(products, -1, -2)))
    ranks = np.real(np.trace(products, axis1=-2, axis2=-1))
    keep = ranks > 0.5
    eigenvalues = np.broadcast_to(basis.eigenvalues[:, None], ranks.shape)
    return SpectralDecomposition(eigenvalues[keep], products[keep], grouping_tol)


def bayesian_network(corners: CycleCorners, ops: CycleOperators, config: CycleConfig) -> BayesianNetwork:
    maps = stroke_maps(ops, config)
    states = [rho.matrix for rho in corners.states] + [corners.rho1.matrix]
    decompositions = [
        corner_decomposition(rho.matrix, energy, config.grouping_tol)
        for rho, energy in zip(corners.states, energy_bases(ops))
    ]
    decompositions.append(decompositions[0])

    weights: List[np.ndarray] = []
    posts: List[np.ndarray] = []
    for state, basis in zip(states, decompositions):
        w, p = _post_measurement(state, basis)
        weights.append(w)
        posts.append(p)

    transfers = []
    for position, stroke in enumerate(maps):
        following = decompositions[position + 1].projectors
        transfers.append(np.real(np.einsum("bij,aji->ab", following, stroke(posts[position]))))

    conditionals = []
    for basis, post in zip(energy_bases(ops), posts):
        conditionals.append(np.real(np.einsum("eij,aji->ae", basis.projectors, post)))

    return BayesianNetwork(
        tuple(decompositions), tuple(weights), tuple(posts), tuple(transfers), tuple(conditionals)
    )


def dbn_joint(corners: CycleCorners, ops: CycleOperators, config: CycleConfig) -> OutcomeJoint:
    """Схема динамической байесовской сети на пяти копиях рабочего тела.
    Вероятность строки исходов (α, β, γ, δ, ε) в собственных базисах угловых состояний смешивается
    с условными вероятностями энергий p(e|λ) и суммируется по строкам.
    """
    network = bayesian_network(corners, ops, config)
    t1, t2, t3, t4 = network.transfers
    c1, c2, c3, c4, c5 = network.conditionals
    table = np.einsum(
        "a,ab,bc,cd,de,aj,bl,cm,dn,er->jlmnr",
        network.weights[0],
        t1,
        t2,
        t3,
        t4,
        c1,
        c2,
        c3,
        c4,
        c5,
        optimize=True,
    )
    return OutcomeJoint(Scheme.DBN, table, energy_bases(ops))


def build_joint(scheme: Scheme, corners: CycleCorners, ops: CycleOperators, config: CycleConfig) -> OutcomeJoint:
    if Scheme(scheme) is Scheme.TPM:
        return tpm_joint(corners, ops, config)
    return dbn_joint(corners, ops, config)


def marginals(joint: OutcomeJoint) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Маргиналы для работы (j, l, m, n), теплоты от горячего резервуара (l, m) и холодного (n, r)."""
    table = joint.probabilities
    return table.sum(axis=4), table.sum(axis=(0, 3, 4)), table.sum(axis=(0, 1, 2))
