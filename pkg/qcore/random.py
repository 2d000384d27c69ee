from typing import Optional

import numpy as np
from scipy.stats import unitary_group

from qcore.operators import ComplexMatrix, DensityMatrix, SpectralDecomposition


def random_hermitian(d: int, rng: np.random.Generator) -> ComplexMatrix:
    a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return 0.5 * (a + a.conj().T)


def random_unitary(d: int, rng: np.random.Generator) -> ComplexMatrix:
    return unitary_group.rvs(d, random_state=rng)


def random_density_matrix(d: int, rng: np.random.Generator, rank: Optional[int] = None) -> DensityMatrix:
    """Случайное состояние вида A A† / tr(A A†) с A размера d×rank (по умолчанию полного ранга)."""
    rank = d if rank is None else rank
    a = rng.normal(size=(d, rank)) + 1j * rng.normal(size=(d, rank))
    rho = a @ a.conj().T
    return DensityMatrix.from_hermitian_part(rho / np.trace(rho).real)


def random_diagonal_state(basis: SpectralDecomposition, rng: np.random.Generator) -> DensityMatrix:
    """Случайная смесь нормированных проекторов базиса (состояние без когерентности в нём)."""
    weights = rng.dirichlet(np.ones(len(basis)))
    rho = np.einsum("a,aij->ij", weights / basis.ranks, basis.projectors)
    return DensityMatrix.from_hermitian_part(rho)


def random_degenerate_hermitian(d: int, rng: np.random.Generator) -> ComplexMatrix:
    """Эрмитова матрица с заведомо вырожденным спектром (первые два уровня совпадают)."""
    levels = np.sort(rng.uniform(-5.0, 5.0, size=d))
    levels[1] = levels[0]
    u = random_unitary(d, rng)
    return u @ np.diag(levels) @ u.conj().T
