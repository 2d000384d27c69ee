import logging
from dataclasses import asdict, dataclass
from typing import Callable, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from config_data.cycle import CycleConfig
from engine.cycle import CycleCorners, CycleOperators, stroke_maps
from measurement_stats.distributions import QuantityKind, joint_distributions, moments
from measurement_stats.joints import OutcomeJoint, Scheme, bayesian_network, build_joint
from qcore.metrics import dephase_matrix
from qcore.operators import DensityMatrix
from qcore.random import random_diagonal_state

EQUIVALENCE_TOL = 1e-9
UNDEFINED_VARIANCE = 1e-14
DEFAULT_PROBE_MIXTURES = 10

# коэффициенты при энергиях пяти измерений
WORK_WEIGHTS = np.array([1.0, -1.0, 1.0, -1.0, 0.0])
HOT_WEIGHTS = np.array([0.0, -1.0, 1.0, 0.0, 0.0])
COLD_WEIGHTS = np.array([0.0, 0.0, 0.0, -1.0, 1.0])


@dataclass(frozen=True)
class SchemeReport:
    """Моменты работы и теплот по распределениям и по замкнутым формулам."""

    scheme: Scheme
    mean_w: float
    var_w: float
    mean_qh: float
    var_qh: float
    mean_qc: float
    var_qc: float
    closed_form_mean_w: float
    closed_form_var_w: float
    closed_form_mean_qh: float
    closed_form_var_qh: float
    closed_form_mean_qc: float
    closed_form_var_qc: float
    first_law_residual: float

    def disagreement(self) -> float:
        """Наибольшее расхождение между двумя способами расчёта моментов."""
        pairs = [
            (self.mean_w, self.closed_form_mean_w),
            (self.var_w, self.closed_form_var_w),
            (self.mean_qh, self.closed_form_mean_qh),
            (self.var_qh, self.closed_form_var_qh),
            (self.mean_qc, self.closed_form_mean_qc),
            (self.var_qc, self.closed_form_var_qc),
        ]
        return max(abs(a - b) for a, b in pairs)

    def to_dict(self) -> dict:
        data = asdict(self)
        data["scheme"] = self.scheme.value
        return data


def _moment_table(means: np.ndarray, pairs: np.ndarray, weights: np.ndarray) -> Tuple[float, float]:
    mean = float(weights @ means)
    return mean, float(weights @ pairs @ weights) - mean**2


def tpm_moment_chain(
    ops: CycleOperators, config: CycleConfig, rho1: np.ndarray, powers: Sequence[int], skip_dephasing: bool = False
) -> float:
    """E[e1^a e2^b e3^c e4^d e5^e] для схемы двух точечных измерений:
    tr{H_e^e D_e T^c(H_e^d D_e U_e(H_k^c D_k T^h(H_k^b D_k U_k(H_e^a D_e ρ1)))))}.
    skip_dephasing убирает D_k после горячей изохоры (тестовая неисправность).
    """
    compression, hot_isochore, expansion, cold_isochore = stroke_maps(ops, config)
    h_e, h_k = ops.h_e_matrix, ops.h_k_matrix
    a, b, c, d, e = powers
    power = np.linalg.matrix_power

    x = power(h_e, a) @ dephase_matrix(rho1, ops.h_e.projectors)
    x = power(h_k, b) @ dephase_matrix(compression(x), ops.h_k.projectors)
    x = hot_isochore(x)
    x = power(h_k, c) @ (x if skip_dephasing else dephase_matrix(x, ops.h_k.projectors))
    x = power(h_e, d) @ dephase_matrix(expansion(x), ops.h_e.projectors)
    x = power(h_e, e) @ dephase_matrix(cold_isochore(x), ops.h_e.projectors)
    return float(np.real(np.trace(x)))


def _tpm_moments(
    corners: CycleCorners, ops: CycleOperators, config: CycleConfig, skip_dephasing: bool
) -> Tuple[np.ndarray, np.ndarray]:
    rho1 = corners.rho1.matrix
    means = np.zeros(5)
    pairs = np.zeros((5, 5))
    for i in range(5):
        powers = [0] * 5
        powers[i] = 1
        means[i] = tpm_moment_chain(ops, config, rho1, powers, skip_dephasing)
        for j in range(i, 5):
            powers = [0] * 5
            powers[i] += 1
            powers[j] += 1
            pairs[i, j] = pairs[j, i] = tpm_moment_chain(ops, config, rho1, powers, skip_dephasing)
    return means, pairs


def _dbn_moments(corners: CycleCorners, ops: CycleOperators, config: CycleConfig) -> Tuple[np.ndarray, np.ndarray]:
    network = bayesian_network(corners, ops, config)
    states = [rho.matrix for rho in corners.states] + [corners.rho1.matrix]
    hamiltonians = [ops.h_e_matrix, ops.h_k_matrix, ops.h_k_matrix, ops.h_e_matrix, ops.h_e_matrix]

    means = np.array([np.real(np.trace(h @ rho)) for h, rho in zip(hamiltonians, states)])
    conditional_energy = [
        np.real(np.einsum("ij,aji->a", h, post)) for h, post in zip(hamiltonians, network.posts)
    ]
    pairs = np.zeros((5, 5))
    for i in range(5):
        pairs[i, i] = np.real(np.trace(hamiltonians[i] @ hamiltonians[i] @ states[i]))
        weight = np.diag(network.weights[i])
        for j in range(i + 1, 5):
            weight = weight @ network.transfers[j - 1]
            pairs[i, j] = pairs[j, i] = conditional_energy[i] @ weight @ conditional_energy[j]
    return means, pairs


def _average_chain(
    scheme: Scheme, corners: CycleCorners, ops: CycleOperators, config: CycleConfig
) -> List[Callable[[np.ndarray], np.ndarray]]:
    compression, hot_isochore, expansion, cold_isochore = stroke_maps(ops, config)
    if scheme is Scheme.TPM:
        bases = [ops.h_e, ops.h_k, ops.h_k, ops.h_e, ops.h_e]
    else:
        bases = list(bayesian_network(corners, ops, config).decompositions)

    def dephasing(position: int):
        return lambda x: dephase_matrix(x, bases[position].projectors)

    return [
        dephasing(0),
        compression,
        dephasing(1),
        hot_isochore,
        dephasing(2),
        expansion,
        dephasing(3),
        cold_isochore,
        dephasing(4),
    ]


def avg_post_measurement_state(
    scheme: Scheme, corners: CycleCorners, ops: CycleOperators, config: CycleConfig
) -> DensityMatrix:
    """Среднее состояние после цикла с пятью измерениями.
    TPM: D_e T^c D_e U_e D_k T^h D_k U_k D_e(ρ1); DBN: та же цепочка с дефазировками
    в собственных базисах угловых состояний.
    """
    x = corners.rho1.matrix
    for step in _average_chain(Scheme(scheme), corners, ops, config):
        x = step(x)
    return DensityMatrix.from_hermitian_part(x)


def first_law_residual(
    scheme: Scheme, corners: CycleCorners, ops: CycleOperators, config: CycleConfig, skip_dephasing: bool = False
) -> float:
    """Отклонение средней энергии за цикл tr{H_e[ρ1 − T^c U_e D T^h U_k D(ρ1)]}."""
    compression, hot_isochore, expansion, cold_isochore = stroke_maps(ops, config)
    rho1 = corners.rho1.matrix
    if Scheme(scheme) is Scheme.TPM:
        x = hot_isochore(compression(dephase_matrix(rho1, ops.h_e.projectors)))
        if not skip_dephasing:
            x = dephase_matrix(x, ops.h_k.projectors)
        final = cold_isochore(expansion(x))
    else:
        final = avg_post_measurement_state(Scheme.DBN, corners, ops, config).matrix
    return float(np.real(np.trace(ops.h_e_matrix @ (rho1 - final))))


def closed_form_report(
    scheme: Scheme,
    corners: CycleCorners,
    ops: CycleOperators,
    config: CycleConfig,
    joint: Optional[OutcomeJoint] = None,
    skip_dephasing: bool = False,
) -> SchemeReport:
    """Сводка моментов схемы: по распределениям из совместного распределения и по замкнутым формулам.
    :param scheme: Схема измерений.
    :param corners: Предельный цикл.
    :param ops: Операторы цикла.
    :param config: Параметры цикла.
    :param joint: Готовое совместное распределение; строится заново, если не передано.
    :param skip_dephasing: Тестовая неисправность для схемы TPM.
    :return SchemeReport: Моменты двумя способами и невязка первого закона.
    """
    scheme = Scheme(scheme)
    joint = joint or build_joint(scheme, corners, ops, config)
    distributions = joint_distributions(joint, config.merge_tol)
    mean_w, var_w = moments(distributions[QuantityKind.WORK])
    mean_qh, var_qh = moments(distributions[QuantityKind.HEAT_H])
    mean_qc, var_qc = moments(distributions[QuantityKind.HEAT_C])

    if scheme is Scheme.TPM:
        means, pairs = _tpm_moments(corners, ops, config, skip_dephasing)
    else:
        means, pairs = _dbn_moments(corners, ops, config)
    cf_mean_w, cf_var_w = _moment_table(means, pairs, WORK_WEIGHTS)
    cf_mean_qh, cf_var_qh = _moment_table(means, pairs, HOT_WEIGHTS)
    cf_mean_qc, cf_var_qc = _moment_table(means, pairs, COLD_WEIGHTS)

    report = SchemeReport(
        scheme=scheme,
        mean_w=mean_w,
        var_w=var_w,
        mean_qh=mean_qh,
        var_qh=var_qh,
        mean_qc=mean_qc,
        var_qc=var_qc,
        closed_form_mean_w=cf_mean_w,
        closed_form_var_w=cf_var_w,
        closed_form_mean_qh=cf_mean_qh,
        closed_form_var_qh=cf_var_qh,
        closed_form_mean_qc=cf_mean_qc,
        closed_form_var_qc=cf_var_qc,
        first_law_residual=first_law_residual(scheme, corners, ops, config, skip_dephasing),
    )
    if report.disagreement() > 1e-8:
        logging.warning(
            f"Схема {scheme.value}: замкнутые формулы расходятся с распределениями на {report.disagreement():.3e}"
        )
    return report


def default_probes(ops: CycleOperators, seed: int = 0) -> List[DensityMatrix]:
    """Нормированные собственные проекторы H_e и H_k и случайные диагональные смеси."""
    probes = []
    for basis in (ops.h_e, ops.h_k):
        for projector, rank in zip(basis.projectors, basis.ranks):
            probes.append(DensityMatrix.from_hermitian_part(projector / rank))
    rng = np.random.default_rng(seed)
    probes.extend(random_diagonal_state(ops.h_e, rng) for _ in range(DEFAULT_PROBE_MIXTURES))
    return probes


def check_equivalence_conditions(
    ops: CycleOperators, config: CycleConfig, probe_states: Optional[Sequence[DensityMatrix]] = None
) -> Tuple[bool, float]:
    """Проверяет, что ходы не создают когерентность из некогерентных состояний.
    r1 = ‖U_k D_e(ρ) U_k† − D_k(U_k D_e(ρ) U_k†)‖_max, r2 - то же для U_e, D_k, D_e.
    :return tuple: (условия выполнены, наибольшая невязка).
    """
    compression, _, expansion, _ = stroke_maps(ops, config)
    probes = probe_states if probe_states is not None else default_probes(ops)
    worst = 0.0
    for probe in probes:
        compressed = compression(dephase_matrix(probe.matrix, ops.h_e.projectors))
        expanded = expansion(dephase_matrix(probe.matrix, ops.h_k.projectors))
        r1 = np.max(np.abs(compressed - dephase_matrix(compressed, ops.h_k.projectors)))
        r2 = np.max(np.abs(expanded - dephase_matrix(expanded, ops.h_e.projectors)))
        worst = max(worst, float(r1), float(r2))
    return worst < EQUIVALENCE_TOL, worst


class FluctuationRatio(NamedTuple):
    eta2: Optional[float]
    bound: float
    violated: Optional[bool]

    @property
    def ratio(self) -> Optional[float]:
        if self.eta2 is None:
            return None
        return self.eta2 / self.bound


def fluctuation_ratio(report: SchemeReport, config: CycleConfig) -> FluctuationRatio:
    """η² = σ_w²/σ_qh² против квадрата КПД Карно (1 − T_c/T_h)²; при σ_qh² < 1e-14 η² не определено."""
    bound = (1.0 - config.T_c / config.T_h) ** 2
    if report.var_qh < UNDEFINED_VARIANCE:
        return FluctuationRatio(None, bound, None)
    eta2 = report.var_w / report.var_qh
    return FluctuationRatio(eta2, bound, eta2 > bound)
