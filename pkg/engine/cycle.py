import logging
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Callable, NamedTuple, Optional, Tuple

import numpy as np

from config_data.cycle import CycleConfig
from engine.channel import apply_gad, gibbs_state, level_populations
from engine.protocol import DrivingProtocol, propagator
from qcore.errors import ConvergenceError
from qcore.metrics import trace_distance
from qcore.operators import (
    ComplexMatrix,
    DensityMatrix,
    SpectralDecomposition,
    conjugate,
    eig_hermitian,
    spin_operators,
)

ROUNDOFF_FLOOR = 64 * np.finfo(float).eps
MAX_CONTRACTION = 0.9999
STALL_WINDOW = 256

StrokeMap = Callable[[ComplexMatrix], ComplexMatrix]


@dataclass(frozen=True)
class CycleOperators:
    """Неизменяемые операторы одного цикла: пропагаторы ходов, гамильтонианы в концах ходов и состояния Гиббса."""

    u_k: ComplexMatrix
    u_e: ComplexMatrix
    h_k: SpectralDecomposition
    h_e: SpectralDecomposition
    gibbs_h: DensityMatrix
    gibbs_c: DensityMatrix

    @property
    def dim(self) -> int:
        return self.u_k.shape[0]

    @property
    def h_k_matrix(self) -> ComplexMatrix:
        return self.h_k.reconstruct()

    @property
    def h_e_matrix(self) -> ComplexMatrix:
        return self.h_e.reconstruct()


@lru_cache(maxsize=32)
def stroke_unitaries(stroke_key: tuple) -> Tuple[ComplexMatrix, ComplexMatrix]:
    """Пропагаторы сжатия (ω_c → ω_h) и расширения (ω_h → ω_c), кэшируются по параметрам ходов."""
    d, omega_h, omega_c, g, t_k, t_e, steps, tol = stroke_key
    sx, _, sz = spin_operators(d)
    logging.debug(f"Расчёт пропагаторов: d={d}, g={g}, t_k={t_k}, t_e={t_e}")
    u_k = propagator(DrivingProtocol(omega_c, omega_h, g, t_k), sx, sz, steps, tol)
    u_e = propagator(DrivingProtocol(omega_h, omega_c, g, t_e), sx, sz, steps, tol)
    u_k.setflags(write=False)
    u_e.setflags(write=False)
    return u_k, u_e


def build_cycle(config: CycleConfig) -> CycleOperators:
    """Строит операторы цикла Отто для заданной конфигурации.
    :param config: Параметры цикла.
    :return CycleOperators: Пропагаторы, разложения H_k(t_k) = ω_h S_z и H_e(t_e) = ω_c S_z, состояния Гиббса.
    """
    u_k, u_e = stroke_unitaries(config.stroke_key())
    _, _, sz = spin_operators(config.d)
    h_k = eig_hermitian(config.omega_h * sz, config.grouping_tol)
    h_e = eig_hermitian(config.omega_c * sz, config.grouping_tol)
    return CycleOperators(
        u_k=u_k,
        u_e=u_e,
        h_k=h_k,
        h_e=h_e,
        gibbs_h=gibbs_state(h_k, config.T_h),
        gibbs_c=gibbs_state(h_e, config.T_c),
    )


def stroke_maps(ops: CycleOperators, config: CycleConfig) -> Tuple[StrokeMap, StrokeMap, StrokeMap, StrokeMap]:
    """Четыре хода цикла как линейные отображения операторов: U_k, T^h, U_e, T^c."""
    populations_h = level_populations(ops.gibbs_h.matrix, ops.h_k)
    populations_c = level_populations(ops.gibbs_c.matrix, ops.h_e)

    def compression(x: ComplexMatrix) -> ComplexMatrix:
        return conjugate(ops.u_k, x)

    def hot_isochore(x: ComplexMatrix) -> ComplexMatrix:
        return apply_gad(x, config.lambda_h, ops.gibbs_h.matrix, ops.h_k, populations_h)

    def expansion(x: ComplexMatrix) -> ComplexMatrix:
        return conjugate(ops.u_e, x)

    def cold_isochore(x: ComplexMatrix) -> ComplexMatrix:
        return apply_gad(x, config.lambda_c, ops.gibbs_c.matrix, ops.h_e, populations_c)

    return compression, hot_isochore, expansion, cold_isochore


def _apply_cycle(x: ComplexMatrix, maps) -> ComplexMatrix:
    for stroke in maps:
        x = stroke(x)
    return x


def cycle_map(rho: DensityMatrix, ops: CycleOperators, config: CycleConfig) -> DensityMatrix:
    """Λ = T^c U_e T^h U_k: один полный цикл."""
    return DensityMatrix.from_hermitian_part(_apply_cycle(rho.matrix, stroke_maps(ops, config)))


@dataclass(frozen=True)
class CycleCorners:
    """Состояния в четырёх углах предельного цикла и диагностика итераций."""

    rho1: DensityMatrix
    rho2: DensityMatrix
    rho3: DensityMatrix
    rho4: DensityMatrix
    iterations: int
    residual: float

    @property
    def states(self) -> Tuple[DensityMatrix, DensityMatrix, DensityMatrix, DensityMatrix]:
        return self.rho1, self.rho2, self.rho3, self.rho4


def _hermitize(x: ComplexMatrix) -> ComplexMatrix:
    x = 0.5 * (x + x.conj().T)
    return x / np.trace(x).real


def _distance(a: ComplexMatrix, b: ComplexMatrix) -> float:
    return 0.5 * float(np.sum(np.linalg.svd(a - b, compute_uv=False)))


def limit_cycle(ops: CycleOperators, config: CycleConfig, initial: Optional[DensityMatrix] = None) -> CycleCorners:
    """Предельный цикл прямой итерацией Λ.
    Итерации идут до тех пор, пока следовое расстояние между соседними итерациями меньше
    fixed_point_tol и оценка расстояния до неподвижной точки (по скорости сжатия) тоже меньше его,
    либо пока шаг ниже fixed_point_tol и перестал убывать (минимум за окно STALL_WINDOW итераций
    не уменьшился вдвое по сравнению с предыдущим окном).
    :param ops: Операторы цикла.
    :param config: Параметры цикла.
    :param initial: Начальное состояние, по умолчанию I/d.
    :return CycleCorners: ρ1 (после холодной изохоры), ρ2 = U_k ρ1 U_k†, ρ3 = T^h(ρ2), ρ4 = U_e ρ3 U_e†.
    """
    maps = stroke_maps(ops, config)
    tol = config.fixed_point_tol
    cap = config.iteration_cap
    current = (initial or DensityMatrix.maximally_mixed(ops.dim)).matrix
    previous_step = np.inf
    step = np.inf
    window_min = previous_window_min = np.inf
    window_count = 0

    for iteration in range(1, cap + 1):
        following = _hermitize(_apply_cycle(current, maps))
        step = _distance(following, current)
        current = following
        if step < tol:
            contraction = min(step / previous_step, MAX_CONTRACTION) if previous_step > 0 else 0.0
            if step * contraction / (1.0 - contraction) < tol or step < ROUNDOFF_FLOOR:
                break
            # шаг перестал убывать на уровне ошибок округления
            window_min = min(window_min, step)
            window_count += 1
            if window_count == STALL_WINDOW:
                if window_min >= 0.5 * previous_window_min:
                    break
                previous_window_min, window_min, window_count = window_min, np.inf, 0
        previous_step = step
    else:
        raise ConvergenceError(
            f"предельный цикл не найден за {cap} итераций", achieved=float(step), iterations=cap
        )

    rho1 = DensityMatrix.from_hermitian_part(current)
    residual = _distance(_hermitize(_apply_cycle(rho1.matrix, maps)), rho1.matrix)
    if residual >= 10 * tol:
        raise ConvergenceError("Λ(ρ1) не совпадает с ρ1", achieved=residual, iterations=iteration)
    logging.debug(f"Предельный цикл: {iteration} итераций, невязка {residual:.3e}")

    compression, hot_isochore, expansion, _ = maps
    rho2 = DensityMatrix.from_hermitian_part(compression(rho1.matrix))
    rho3 = DensityMatrix.from_hermitian_part(hot_isochore(rho2.matrix))
    rho4 = DensityMatrix.from_hermitian_part(expansion(rho3.matrix))
    return CycleCorners(rho1, rho2, rho3, rho4, iteration, residual)


class Thermodynamics(NamedTuple):
    work: float
    heat_hot: float
    heat_cold: float


def unmeasured_thermo(corners: CycleCorners, ops: CycleOperators, config: CycleConfig) -> Thermodynamics:
    """Средние работа и теплоты цикла без измерений.
    Q_h = tr[H_k(ρ3 − ρ2)], Q_c = tr[H_e(ρ1 − ρ4)], W = Q_h + Q_c.
    """
    heat_hot = float(np.real(np.trace(ops.h_k_matrix @ (corners.rho3.matrix - corners.rho2.matrix))))
    heat_cold = float(np.real(np.trace(ops.h_e_matrix @ (corners.rho1.matrix - corners.rho4.matrix))))
    return Thermodynamics(heat_hot + heat_cold, heat_hot, heat_cold)


class Regime(str, Enum):
    ENGINE = "Engine"
    ACCELERATOR = "Accelerator"
    HEATER = "Heater"
    OTHER = "Other"


def classify_regime(w: float, qh: float, qc: float, tol: float = 1e-10) -> Regime:
    """Режим работы машины по знакам средней работы и теплот."""
    if qc < -tol:
        if qh > tol and w > tol:
            return Regime.ENGINE
        if qh > tol and w < -tol:
            return Regime.ACCELERATOR
        if qh < -tol and w < -tol:
            return Regime.HEATER
    return Regime.OTHER


def efficiency(w: float, qh: float, tol: float = 1e-10) -> Optional[float]:
    if abs(qh) <= tol:
        return None
    return w / qh
