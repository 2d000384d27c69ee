"""Независимые переборные расчёты для кубита (d = 2).

Всё кодируется напрямую через кет-векторы базиса S_z и операторы Крауса
обобщённого амплитудного затухания, без общих с библиотекой функций измерений.
"""

import itertools
from typing import List, Tuple

import numpy as np

from config_data.cycle import CycleConfig

UP = np.array([1.0, 0.0], dtype=np.complex128)
DOWN = np.array([0.0, 1.0], dtype=np.complex128)


def energy_kets(omega: float) -> List[Tuple[float, np.ndarray]]:
    """Уровни ω·S_z по возрастанию энергии: |↓⟩ (−ω/2), затем |↑⟩ (+ω/2)."""
    return [(-omega / 2, DOWN), (omega / 2, UP)]


def kraus_operators(lam: float, omega: float, temperature: float) -> List[np.ndarray]:
    """Операторы Крауса затухания к состоянию Гиббса кубита.
    q - заселённость верхнего уровня |↑⟩ в равновесии.
    """
    q = 1.0 / (1.0 + np.exp(omega / temperature))
    s = np.sqrt(1.0 - lam)
    r = np.sqrt(lam)
    return [
        np.sqrt(q) * np.array([[1.0, 0.0], [0.0, s]]),
        np.sqrt(q) * np.array([[0.0, r], [0.0, 0.0]]),
        np.sqrt(1.0 - q) * np.array([[s, 0.0], [0.0, 1.0]]),
        np.sqrt(1.0 - q) * np.array([[0.0, 0.0], [r, 0.0]]),
    ]


def apply_kraus(kraus: List[np.ndarray], x: np.ndarray) -> np.ndarray:
    return sum(k @ x @ k.conj().T for k in kraus)


def projector(ket: np.ndarray) -> np.ndarray:
    return np.outer(ket, ket.conj())


class QubitCycle:
    def __init__(self, config: CycleConfig, u_k: np.ndarray, u_e: np.ndarray) -> None:
        self.levels_k = energy_kets(config.omega_h)
        self.levels_e = energy_kets(config.omega_c)
        self.hot = kraus_operators(config.lambda_h, config.omega_h, config.T_h)
        self.cold = kraus_operators(config.lambda_c, config.omega_c, config.T_c)
        self.u_k = u_k
        self.u_e = u_e

    def strokes(self):
        return (
            lambda x: self.u_k @ x @ self.u_k.conj().T,
            lambda x: apply_kraus(self.hot, x),
            lambda x: self.u_e @ x @ self.u_e.conj().T,
            lambda x: apply_kraus(self.cold, x),
        )

    def measurement_bases(self):
        return [self.levels_e, self.levels_k, self.levels_k, self.levels_e, self.levels_e]


def tpm_histories(cycle: QubitCycle, rho1: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Перебор всех 2⁵ историй проективных измерений энергии.
    :return tuple: (совместное распределение 2×2×2×2×2, среднее конечное состояние).
    """
    strokes = cycle.strokes()
    bases = cycle.measurement_bases()
    table = np.zeros((2,) * 5)
    average = np.zeros((2, 2), dtype=np.complex128)
    for history in itertools.product(range(2), repeat=5):
        state = rho1
        for position, outcome in enumerate(history):
            p = projector(bases[position][outcome][1])
            state = p @ state @ p
            if position < 4:
                state = strokes[position](state)
        table[history] = np.real(np.trace(state))
        average += state
    return table, average


def tpm_work_marginal(cycle: QubitCycle, rho1: np.ndarray) -> np.ndarray:
    """p_w(j, l, m, n) = tr{Π_n U_e(Π_m T^h(Π_l U_k(Π_j ρ1 Π_j) Π_l) Π_m) Π_n}."""
    compression, hot, expansion, _ = cycle.strokes()
    bases = cycle.measurement_bases()
    table = np.zeros((2,) * 4)
    for j, l, m, n in itertools.product(range(2), repeat=4):
        pj, pl, pm, pn = (projector(bases[i][k][1]) for i, k in enumerate((j, l, m, n)))
        state = pn @ expansion(pm @ hot(pl @ compression(pj @ rho1 @ pj) @ pl) @ pm) @ pn
        table[j, l, m, n] = np.real(np.trace(state))
    return table


def dbn_histories(cycle: QubitCycle, corners: List[np.ndarray]) -> np.ndarray:
    """Пять копий: измерения в собственных базисах ρ1, ρ2, ρ3, ρ4, ρ1 и байесовский вывод энергий."""
    strokes = cycle.strokes()
    bases = cycle.measurement_bases()
    eigen = []
    for state in list(corners) + [corners[0]]:
        values, vectors = np.linalg.eigh(state)
        eigen.append([(values[a], vectors[:, a]) for a in range(2)])

    table = np.zeros((2,) * 5)
    for string in itertools.product(range(2), repeat=5):
        weight, ket = eigen[0][string[0]]
        probability = weight
        for position in range(4):
            following = eigen[position + 1][string[position + 1]][1]
            evolved = strokes[position](projector(eigen[position][string[position]][1]))
            probability *= np.real(following.conj() @ evolved @ following)
        for energies in itertools.product(range(2), repeat=5):
            conditional = 1.0
            for position, (label, level) in enumerate(zip(string, energies)):
                overlap = bases[position][level][1].conj() @ eigen[position][label][1]
                conditional *= abs(overlap) ** 2
            table[energies] += probability * conditional
    return table
