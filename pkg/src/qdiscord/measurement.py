"""Rank-1 projective measurements on one side of a bipartite state."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .states import (
    PAULI,
    BipartiteState,
    DensityMatrix,
    DimensionError,
    Side,
    entropies_batch,
)

ZERO_PROBABILITY = 1e-12


@dataclass(frozen=True, eq=False)
class ProjectiveBasis:
    """Complete set of orthogonal rank-1 projectors, stored via their unit vectors.

    ``vectors[:, a]`` spans the range of projector ``a``.
    """

    vectors: np.ndarray

    def __post_init__(self):
        u = np.array(self.vectors, dtype=complex)
        if u.ndim != 2 or u.shape[0] != u.shape[1]:
            raise DimensionError(f"basis needs a square matrix of columns, got {u.shape}")
        if np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))) > 1e-10:
            raise ValueError("basis vectors are not orthonormal")
        u.setflags(write=False)
        object.__setattr__(self, "vectors", u)

    @property
    def dim(self) -> int:
        return self.vectors.shape[0]

    @property
    def projectors(self) -> np.ndarray:
        u = self.vectors
        return np.einsum("ia,ja->aij", u, u.conj())

    def conjugated(self, u) -> "ProjectiveBasis":
        """The basis {U P_a U^H}."""
        return ProjectiveBasis(np.asarray(u) @ self.vectors)


def bloch_vector(theta: float, phi: float) -> np.ndarray:
    return np.array([np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi), np.cos(theta)])


def basis_from_bloch(theta: float, phi: float) -> ProjectiveBasis:
    """Qubit basis {(1 + n.sigma)/2, (1 - n.sigma)/2} along Bloch direction n(theta, phi)."""
    up = np.array([np.cos(theta / 2), np.exp(1j * phi) * np.sin(theta / 2)])
    down = np.array([-np.exp(-1j * phi) * np.sin(theta / 2), np.cos(theta / 2)])
    return ProjectiveBasis(np.column_stack([up, down]))


def basis_from_unitary(u) -> ProjectiveBasis:
    u = np.asarray(u, dtype=complex)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {u.shape}")
    if np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))) > 1e-10:
        raise ValueError("matrix is not unitary")
    return ProjectiveBasis(u)


def computational_basis(d: int) -> ProjectiveBasis:
    return ProjectiveBasis(np.eye(d))


@dataclass(frozen=True, eq=False)
class MeasurementRecord:
    probabilities: np.ndarray
    conditional_states: tuple[DensityMatrix, ...]
    # outcomes whose conditional state is a maximally mixed placeholder (p below threshold)
    placeholder: tuple[bool, ...]
    post_state: BipartiteState
    basis: ProjectiveBasis
    side: Side = "A"


def measure_subsystem(s: BipartiteState, basis: ProjectiveBasis, on: Side = "A") -> MeasurementRecord:
    """Non-selective projective measurement of one subsystem.

    Conditional states belong to the unmeasured side. An outcome with
    probability below 1e-12 gets a maximally mixed placeholder, flagged in
    ``placeholder`` and ignored by :func:`conditional_entropy`.
    """
    if on == "B":
        rec = measure_subsystem(s.swapped(), basis, "A")
        return MeasurementRecord(
            rec.probabilities, rec.conditional_states, rec.placeholder,
            rec.post_state.swapped(), basis, "B",
        )
    if on != "A":
        raise ValueError(f"subsystem label must be 'A' or 'B', got {on!r}")
    da, db = s.dims
    if basis.dim != da:
        raise DimensionError(f"basis dimension {basis.dim} does not match subsystem dimension {da}")
    t = s.matrix.reshape(da, db, da, db)
    u = basis.vectors
    # <u_a| rho |u_a> as operators on B
    blocks = np.einsum("ia,ijkl,ka->ajl", u.conj(), t, u)
    probs = np.clip(np.einsum("ajj->a", blocks).real, 0.0, None)
    conds, flags = [], []
    for a in range(da):
        if probs[a] < ZERO_PROBABILITY:
            conds.append(DensityMatrix.maximally_mixed(db))
            flags.append(True)
        else:
            conds.append(DensityMatrix._trusted(blocks[a] / probs[a]))
            flags.append(False)
    post = sum(
        np.kron(basis.projectors[a], blocks[a]) for a in range(da)
    )
    return MeasurementRecord(
        probabilities=probs / probs.sum(),
        conditional_states=tuple(conds),
        placeholder=tuple(flags),
        post_state=BipartiteState._trusted(post, da, db),
        basis=basis,
        side="A",
    )


def conditional_entropy(rec: MeasurementRecord) -> float:
    """S(rho_B | Pi) = sum_a p_a S(rho_B|a), placeholders excluded."""
    keep = [a for a, flag in enumerate(rec.placeholder) if not flag]
    if not keep:
        return 0.0
    mats = np.array([rec.conditional_states[a].data for a in keep])
    return float(np.dot(rec.probabilities[keep], entropies_batch(mats)))


def outcome_entropy(rec: MeasurementRecord) -> float:
    """Shannon entropy H(A^Pi) of the outcome distribution."""
    p = rec.probabilities[rec.probabilities > 0]
    return float(max(0.0, -np.sum(p * np.log2(p))))


def pauli_components(s: BipartiteState) -> tuple[np.ndarray, np.ndarray]:
    """For a qubit A: rho_B and the operators T_i = tr_A[(sigma_i x 1) rho] on B.

    The unnormalized conditional state for outcome +/- along n is
    (rho_B +/- n.T)/2, which lets the discord objectives be evaluated in bulk.
    """
    if s.dim_a != 2:
        raise DimensionError("pauli_components needs a qubit on side A")
    t = s.matrix.reshape(2, s.dim_b, 2, s.dim_b)
    rho_b = np.einsum("ijil->jl", t)
    ts = np.einsum("pki,ijkl->pjl", PAULI, t)
    return rho_b, ts
