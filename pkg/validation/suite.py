"""Набор свойств, проверяемых командой validate на случайных конфигурациях."""

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, List, Optional, Tuple

import numpy as np

from API.engine_api import analyze_cycle
from config_data.cycle import CycleConfig
from engine.channel import apply_gad, gibbs_state, level_populations
from engine.cycle import limit_cycle
from engine.protocol import DrivingProtocol, fixed_step_propagator, propagator
from measurement_stats.joints import Scheme
from measurement_stats.reports import avg_post_measurement_state
from qcore.metrics import dephase_matrix, trace_distance
from qcore.operators import eig_hermitian, spin_operators
from qcore.random import random_density_matrix
from validation.oracle import QubitCycle, dbn_histories, tpm_histories, tpm_work_marginal

SUITE_CONFIGS = 200
CLOSED_FORM_CONFIGS = 50
ORACLE_CONFIGS = 20
MULTISTART_CONFIGS = 20
MULTISTART_MIN_RATE = 0.05
GAD_TRIALS = 30
SUITE_PROPAGATOR_TOL = 1e-8

TOLERANCES = {
    "evaluation": 0.5,
    "dbn-exactness": 1e-9,
    "dbn-backaction": 1e-10,
    "tpm-backaction-trivial": 1e-10,
    "equivalence-kl": 1e-10,
    "equivalence-conditions": 1e-9,
    "normalization": 1e-10,
    "first-law": 1e-9,
    "closed-form-agreement": 1e-8,
    "oracle-joint": 1e-10,
    "oracle-work-marginal": 1e-10,
    "oracle-average-state": 1e-9,
    "limit-cycle-multistart": 10 * CycleConfig.model_fields["fixed_point_tol"].default,
    "gad-channel": 1e-10,
    "propagator-unitarity": 1e-10,
    "propagator-order": 0.3,
}

CLOSED_FORM = "closed-form"
ORACLE = "oracle"
MULTISTART = "multistart"
GENERIC = "generic"

Measurements = Dict[str, float]


@dataclass(frozen=True)
class InvariantResult:
    name: str
    checked: int
    failed: int
    worst: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.failed == 0


def random_config(rng: np.random.Generator, d: Optional[int] = None) -> CycleConfig:
    """Случайная конфигурация в диапазонах параметров рисунков.
    :param rng: Генератор случайных чисел.
    :param d: Размерность; по умолчанию одна из 2, 3, 4.
    :return CycleConfig: Конфигурация с propagator_tol = 1e-8.
    """
    d = int(rng.choice([2, 3, 4])) if d is None else d
    if rng.random() < 0.1:
        lambda_h = lambda_c = 1.0
    else:
        lambda_h, lambda_c = (round(float(x), 6) for x in rng.uniform(0.05, 1.0, size=2))
    g = 0.0 if rng.random() < 0.1 else round(float(rng.uniform(0.0, 10.0)), 6)
    omega_h = round(float(rng.uniform(1.0, 10.0)), 6)
    omega_c = round(omega_h * float(rng.uniform(0.05, 0.9)), 6)
    t_h = round(float(rng.uniform(1.0, 15.0)), 6)
    t_c = round(float(rng.uniform(0.1, 1.0)), 6)
    return CycleConfig(
        d=d,
        omega_h=omega_h,
        omega_c=omega_c,
        T_h=t_h,
        T_c=t_c,
        g=g,
        lambda_h=lambda_h,
        lambda_c=lambda_c,
        propagator_tol=SUITE_PROPAGATOR_TOL,
    )


def _oracle_checks(analysis) -> Measurements:
    corners = analysis.corners
    cycle = QubitCycle(analysis.config, analysis.ops.u_k, analysis.ops.u_e)
    tpm_table, tpm_average = tpm_histories(cycle, corners.rho1.matrix)
    dbn_table = dbn_histories(cycle, [rho.matrix for rho in corners.states])
    library_tpm = analysis.joints[Scheme.TPM].probabilities
    library_average = avg_post_measurement_state(Scheme.TPM, corners, analysis.ops, analysis.config).matrix
    return {
        "oracle-joint": max(
            float(np.max(np.abs(tpm_table - library_tpm))),
            float(np.max(np.abs(dbn_table - analysis.joints[Scheme.DBN].probabilities))),
        ),
        "oracle-work-marginal": float(
            np.max(np.abs(tpm_work_marginal(cycle, corners.rho1.matrix) - library_tpm.sum(axis=4)))
        ),
        "oracle-average-state": float(np.max(np.abs(tpm_average - library_average))),
    }


def check_config(config: CycleConfig, checks: FrozenSet[str], skip_dephasing: bool = False, seed: int = 0) -> Measurements:
    """Все применимые к конфигурации свойства.
    :param config: Конфигурация цикла.
    :param checks: Группы проверок: generic, closed-form, oracle, multistart.
    :param skip_dephasing: Тестовая неисправность замкнутых формул TPM.
    :param seed: Зерно для случайного начального состояния.
    :return Measurements: Наибольшее отклонение по каждому проверенному свойству.
    """
    try:
        analysis = analyze_cycle(config, skip_dephasing=skip_dephasing)
    except Exception as e:
        logging.error(f"Проверка конфигурации {config.model_dump_json()} прервана: {e}")
        return {"evaluation": 1.0}

    result: Measurements = {"evaluation": 0.0}
    dbn = analysis.reports[Scheme.DBN]
    thermo = analysis.thermo
    trivial = config.g == 0.0 or (config.lambda_h == 1.0 and config.lambda_c == 1.0)

    if GENERIC in checks:
        result["dbn-exactness"] = max(
            abs(dbn.mean_w - thermo.work), abs(dbn.mean_qh - thermo.heat_hot), abs(dbn.mean_qc - thermo.heat_cold)
        )
        result["dbn-backaction"] = analysis.trace_distances[Scheme.DBN]
        if trivial:
            result["tpm-backaction-trivial"] = analysis.trace_distances[Scheme.TPM]
            result["equivalence-kl"] = max(analysis.kl.values())
        if config.g == 0.0:
            result["equivalence-conditions"] = analysis.equivalence_residual
        result["normalization"] = max(
            [abs(float(joint.probabilities.sum()) - 1.0) for joint in analysis.joints.values()]
            + [abs(dist.total - 1.0) for kinds in analysis.distributions.values() for dist in kinds.values()]
        )
        result["first-law"] = max(
            abs(report.mean_w - report.mean_qh - report.mean_qc - report.first_law_residual)
            for report in analysis.reports.values()
        )
    if CLOSED_FORM in checks:
        result["closed-form-agreement"] = max(report.disagreement() for report in analysis.reports.values())
    if ORACLE in checks:
        result.update(_oracle_checks(analysis))
    if MULTISTART in checks:
        start = random_density_matrix(config.d, np.random.default_rng(seed))
        restarted = limit_cycle(analysis.ops, config, initial=start)
        result["limit-cycle-multistart"] = trace_distance(restarted.rho1, analysis.corners.rho1)
    return result


def _check_job(job: Tuple[CycleConfig, FrozenSet[str], bool, int]) -> Measurements:
    return check_config(*job)


def gad_measurements(rng: np.random.Generator, trials: int = GAD_TRIALS) -> Measurements:
    """Свойства канала термализации на случайных состояниях: след, положительность,
    перестановочность с дефазировкой, множитель затухания когерентностей, предельные λ.
    """
    worst = 0.0
    for _ in range(trials):
        d = int(rng.choice([2, 3, 4]))
        _, _, sz = spin_operators(d)
        basis = eig_hermitian(float(rng.uniform(0.5, 10.0)) * sz)
        sigma = gibbs_state(basis, float(rng.uniform(0.1, 15.0))).matrix
        populations = level_populations(sigma, basis)
        lam = float(rng.uniform(0.0, 1.0))
        rho = random_density_matrix(d, rng).matrix

        output = apply_gad(rho, lam, sigma, basis, populations)
        s = math.sqrt(1.0 - lam)
        # базис S_z совпадает с вычислительным, уровни по возрастанию энергии идут с конца
        level = populations[::-1]
        expected_factor = s * s + s * (1.0 - s) * (level[:, None] + level[None, :])
        off_diagonal = ~np.eye(d, dtype=bool)
        deviations = [
            abs(np.trace(output).real - 1.0),
            max(0.0, -float(np.linalg.eigvalsh(0.5 * (output + output.conj().T)).min())),
            float(np.max(np.abs(
                dephase_matrix(output, basis.projectors)
                - apply_gad(dephase_matrix(rho, basis.projectors), lam, sigma, basis, populations)
            ))),
            float(np.max(np.abs(output[off_diagonal] - expected_factor[off_diagonal] * rho[off_diagonal]))),
            float(np.max(np.abs(apply_gad(rho, 0.0, sigma, basis, populations) - rho))),
            float(np.max(np.abs(apply_gad(rho, 1.0, sigma, basis, populations) - sigma))),
        ]
        if d == 2:
            deviations.append(float(abs(output[0, 1] - s * rho[0, 1])))
        worst = max(worst, *deviations)
    return {"gad-channel": worst}


def propagator_measurements() -> Measurements:
    """Унитарность сошедшегося пропагатора и второй порядок схемы средней точки."""
    sx, _, sz = spin_operators(3)
    protocol = DrivingProtocol(0.5, 10.0, 9.0, 1.0)
    converged = propagator(protocol, sx, sz, tol=SUITE_PROPAGATOR_TOL)
    unitarity = float(np.max(np.abs(converged.conj().T @ converged - np.eye(3))))

    coarse, fine = 64, 128
    reference = fixed_step_propagator(protocol, sx, sz, 8 * fine)
    error_coarse = np.max(np.abs(fixed_step_propagator(protocol, sx, sz, coarse) - reference))
    error_fine = np.max(np.abs(fixed_step_propagator(protocol, sx, sz, fine) - reference))
    order = float(np.log2(error_coarse / error_fine))
    return {"propagator-unitarity": unitarity, "propagator-order": abs(order - 2.0)}


def build_jobs(seed: int, count: int, skip_dephasing: bool) -> List[Tuple[CycleConfig, FrozenSet[str], bool, int]]:
    rng = np.random.default_rng(seed)
    jobs = []
    multistart = 0
    for position in range(count):
        config = random_config(rng)
        checks = {GENERIC}
        if position < CLOSED_FORM_CONFIGS:
            checks.add(CLOSED_FORM)
        if multistart < MULTISTART_CONFIGS and min(config.lambda_h, config.lambda_c) >= MULTISTART_MIN_RATE:
            checks.add(MULTISTART)
            multistart += 1
        jobs.append((config, frozenset(checks), skip_dephasing, seed + position))
    for position in range(ORACLE_CONFIGS):
        jobs.append((random_config(rng, d=2), frozenset({ORACLE}), skip_dephasing, seed + count + position))
    return jobs


def aggregate(measurements: Iterable[Measurements]) -> List[InvariantResult]:
    """Сводит отклонения по свойствам в порядке TOLERANCES."""
    collected: Dict[str, List[float]] = {name: [] for name in TOLERANCES}
    for item in measurements:
        for name, value in item.items():
            collected[name].append(value)
    results = []
    for name, values in collected.items():
        tolerance = TOLERANCES[name]
        failed = sum(1 for value in values if not value < tolerance)
        worst = max(values) if values else math.nan
        results.append(InvariantResult(name, len(values), failed, worst, tolerance))
    return results


def run_suite(
    seed: int = 0, parallelism: int = 1, count: int = SUITE_CONFIGS, skip_dephasing: bool = False
) -> List[InvariantResult]:
    """Прогоняет все свойства.
    :param seed: Зерно случайных конфигураций.
    :param parallelism: Число рабочих процессов.
    :param count: Число случайных конфигураций для общих свойств.
    :param skip_dephasing: Тестовая неисправность: пропуск дефазировки после горячей изохоры в формулах TPM.
    :return List[InvariantResult]: Итог по каждому свойству.
    """
    jobs = build_jobs(seed, count, skip_dephasing)
    logging.info(f"Проверка свойств: {len(jobs)} конфигураций, зерно {seed}")
    if parallelism <= 1:
        measurements = [_check_job(job) for job in jobs]
    else:
        with ProcessPoolExecutor(max_workers=parallelism) as executor:
            measurements = list(executor.map(_check_job, jobs, chunksize=max(1, len(jobs) // (4 * parallelism))))
    measurements.append(gad_measurements(np.random.default_rng(seed)))
    measurements.append(propagator_measurements())
    return aggregate(measurements)
