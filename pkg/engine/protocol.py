import logging
from dataclasses import dataclass

import numpy as np

from qcore.errors import ConvergenceError
from qcore.operators import ComplexMatrix, check_same_dimension

MAX_STEPS = 2**24
CHUNK_ELEMENTS = 2**20


@dataclass(frozen=True)
class DrivingProtocol:
    """Линейное изменение частоты и синусоидальный поперечный импульс на одном унитарном ходе.
    H(t) = ω(t)·S_z + g(t)·S_x, ω(t) = (ω_end − ω_start)·t/τ + ω_start, g(t) = g·sin(πt/τ).
    """

    omega_start: float
    omega_end: float
    g_peak: float
    duration: float

    def __post_init__(self) -> None:
        if not self.duration > 0:
            raise ValueError(f"длительность хода должна быть положительной, получено {self.duration}")

    def omega(self, t):
        return (self.omega_end - self.omega_start) * np.asarray(t) / self.duration + self.omega_start

    def g(self, t):
        return self.g_peak * np.sin(np.pi * np.asarray(t) / self.duration)


def _slice_exponentials(protocol: DrivingProtocol, sx: ComplexMatrix, sz: ComplexMatrix, times, dt: float):
    hamiltonians = protocol.omega(times)[:, None, None] * sz + protocol.g(times)[:, None, None] * sx
    energies, vectors = np.linalg.eigh(hamiltonians)
    phases = np.exp(-1j * dt * energies)
    return vectors @ (phases[:, :, None] * vectors.conj().swapaxes(1, 2))


def _ordered_product(mats: np.ndarray) -> ComplexMatrix:
    """Произведение M_{n−1} ⋯ M_1 M_0 попарным сворачиванием."""
    while mats.shape[0] > 1:
        if mats.shape[0] % 2:
            mats = np.concatenate([mats, np.eye(mats.shape[1], dtype=mats.dtype)[None]])
        mats = mats[1::2] @ mats[0::2]
    return mats[0]


def fixed_step_propagator(protocol: DrivingProtocol, sx: ComplexMatrix, sz: ComplexMatrix, steps: int) -> ComplexMatrix:
    """Упорядоченная по времени экспонента с постоянным шагом по правилу средней точки.
    :param protocol: Протокол хода.
    :param sx: Оператор S_x.
    :param sz: Оператор S_z.
    :param steps: Число отрезков разбиения.
    :return ComplexMatrix: Приближение U(τ, 0) второго порядка по шагу.
    """
    if steps < 2:
        raise ValueError(f"число шагов должно быть ≥ 2, получено {steps}")
    check_same_dimension(sx.shape[0], sz.shape[0])
    d = sz.shape[0]
    dt = protocol.duration / steps
    chunk = max(16, min(16384, CHUNK_ELEMENTS // (d * d)))

    result = np.eye(d, dtype=np.complex128)
    for start in range(0, steps, chunk):
        times = (np.arange(start, min(start + chunk, steps)) + 0.5) * dt
        result = _ordered_product(_slice_exponentials(protocol, sx, sz, times, dt)) @ result
    return result


def propagator(
    protocol: DrivingProtocol,
    sx: ComplexMatrix,
    sz: ComplexMatrix,
    steps: int = 256,
    tol: float = 1e-11,
    max_steps: int = MAX_STEPS,
) -> ComplexMatrix:
    """Пропагатор хода с удвоением числа шагов до сходимости.
    Число шагов удваивается, пока максимальная по модулю разность элементов
    двух последовательных приближений не станет меньше tol.
    :param protocol: Протокол хода.
    :param sx: Оператор S_x.
    :param sz: Оператор S_z.
    :param steps: Начальное число шагов.
    :param tol: Допуск сходимости.
    :param max_steps: Предельное число шагов.
    :return ComplexMatrix: Унитарный пропагатор.
    """
    previous = fixed_step_propagator(protocol, sx, sz, steps)
    error = np.inf
    while steps * 2 <= max_steps:
        steps *= 2
        current = fixed_step_propagator(protocol, sx, sz, steps)
        error = float(np.max(np.abs(current - previous)))
        logging.debug(f"Пропагатор: {steps} шагов, расхождение {error:.3e}")
        if error < tol:
            return current
        previous = current
    raise ConvergenceError(f"пропагатор не сошёлся за {steps} шагов", achieved=error, iterations=steps)
