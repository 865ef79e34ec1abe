"""Random states and unitaries for property checks."""
from __future__ import annotations

import numpy as np
from scipy.stats import unitary_group


def random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    return unitary_group.rvs(d, random_state=rng)


def random_density(d: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    """Ginibre-distributed density matrix of the given rank (full rank by default)."""
    g = rng.normal(size=(d, rank or d)) + 1j * rng.normal(size=(d, rank or d))
    m = g @ g.conj().T
    return m / np.trace(m).real


def random_ket(d: int, rng: np.random.Generator) -> np.ndarray:
    v = rng.normal(size=d) + 1j * rng.normal(size=d)
    return v / np.linalg.norm(v)


def random_classical_quantum(da: int, db: int, rng: np.random.Generator) -> np.ndarray:
    """sum_a p_a Pi_a x rho_a in a random basis on A: zero discord on side A."""
    u = random_unitary(da, rng)
    p = rng.dirichlet(np.ones(da))
    return sum(
        p[a] * np.kron(np.outer(u[:, a], u[:, a].conj()), random_density(db, rng))
        for a in range(da)
    )
