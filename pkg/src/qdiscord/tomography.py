"""Standard process tomography of a qubit coupled to a qubit environment.

The joint state is prepared either by measuring the system and rotating the
post-selected state (``measure-rotate``, one fixed environment state) or by
measuring each probe projector directly (``measure-only``, environment state
depends on the probe). Outputs are inverted linearly into a process matrix
with no positivity constraint, so non-CP reconstructions stay visible.

Process matrix convention: E(rho) = sum_mn chi_mn K_m rho K_n^H with
K_m = |i><j| and m = i + d*j (column-stacking order E00, E10, E01, E11).
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from .gates import HADAMARD, PHASE_S, SIGMA_X, check_unitary
from .states import (
    PAULI,
    BipartiteState,
    DensityMatrix,
    DimensionError,
    as_density,
    partial_trace,
)

CP_TOL = 1e-8
ZERO_PROBABILITY = 1e-12

KET_H = np.array([1, 0], dtype=complex)
KET_V = np.array([0, 1], dtype=complex)
KET_D = np.array([1, 1], dtype=complex) / np.sqrt(2)
KET_R = np.array([1, 1j], dtype=complex) / np.sqrt(2)
PROBE_LABELS = ("H", "V", "D", "R")
CANONICAL_PROBES = (KET_H, KET_V, KET_D, KET_R)


class PreparationError(ValueError):
    pass


def _proj(v) -> np.ndarray:
    v = np.asarray(v, dtype=complex)
    v = v / np.linalg.norm(v)
    return np.outer(v, v.conj())


@dataclass(frozen=True, eq=False)
class PreparationScheme:
    kind: Literal["measure-rotate", "measure-only"]
    probes: tuple[np.ndarray, ...]  # kets of the prepared system states
    anchor: np.ndarray | None = None  # measure-rotate: post-selected ket
    rotations: tuple[np.ndarray, ...] = ()
    labels: tuple[str, ...] = ()

    def __post_init__(self):
        if self.kind == "measure-rotate":
            if self.anchor is None or len(self.rotations) != len(self.probes):
                raise ValueError("measure-rotate needs an anchor and one rotation per probe")
            pa = _proj(self.anchor)
            for r, v in zip(self.rotations, self.probes):
                if np.max(np.abs(r @ pa @ r.conj().T - _proj(v))) > 1e-10:
                    raise ValueError("rotation does not carry the anchor onto its probe state")
        elif self.kind != "measure-only":
            raise ValueError(f"unknown preparation kind {self.kind!r}")
        if not is_complete([_proj(v) for v in self.probes]):
            raise ValueError("probe states are not tomographically complete")

    @property
    def probe_states(self) -> list[np.ndarray]:
        return [_proj(v) for v in self.probes]


def method1(anchor=KET_H) -> PreparationScheme:
    """Measure the anchor projector, then rotate into H, V, D, R."""
    anchor = np.asarray(anchor, dtype=complex)
    if np.allclose(_proj(anchor), _proj(KET_H)):
        rots = (np.eye(2, dtype=complex), SIGMA_X, HADAMARD, PHASE_S @ HADAMARD)
    else:
        # generic anchor: map it to |0> first
        a = anchor / np.linalg.norm(anchor)
        w = np.column_stack([a, [-np.conj(a[1]), np.conj(a[0])]])
        to_h = w.conj().T
        rots = tuple(r @ to_h for r in (np.eye(2), SIGMA_X, HADAMARD, PHASE_S @ HADAMARD))
    return PreparationScheme("measure-rotate", CANONICAL_PROBES, anchor, rots, PROBE_LABELS)


def method2(probes=CANONICAL_PROBES, labels=PROBE_LABELS) -> PreparationScheme:
    """Measurement-only preparation with one projector per probe state."""
    return PreparationScheme("measure-only", tuple(np.asarray(p, complex) for p in probes), labels=tuple(labels))


def hadamard_probes() -> tuple[np.ndarray, ...]:
    """H, V, D, R rotated by a Hadamard: |+>, |->, |0>, |-i>."""
    return tuple(HADAMARD @ v for v in CANONICAL_PROBES)


def prepare(scheme: PreparationScheme, joint: BipartiteState, index: int):
    """Apply preparation ``index``; returns (probe, joint_after, env, probability)."""
    if not 0 <= index < len(scheme.probes):
        raise IndexError(f"preparation index {index} out of range")
    da, db = joint.dims
    if da != 2:
        raise DimensionError("preparations are defined for a qubit system")
    proj = _proj(scheme.anchor if scheme.kind == "measure-rotate" else scheme.probes[index])
    m = np.kron(proj, np.eye(db))
    post = m @ joint.matrix @ m
    p = float(np.trace(post).real)
    if p < ZERO_PROBABILITY:
        raise PreparationError(f"preparation {index} has zero probability")
    if scheme.kind == "measure-rotate":
        r = np.kron(scheme.rotations[index], np.eye(db))
        post = r @ post @ r.conj().T
    after = BipartiteState._trusted(post / p, da, db)
    return (
        DensityMatrix._trusted(_proj(scheme.probes[index])),
        after,
        partial_trace(after, "B"),
        p,
    )


def evolve_and_reduce(joint_after: BipartiteState, u) -> DensityMatrix:
    """tr_B U rho U^H."""
    u = np.asarray(u, dtype=complex)
    if u.shape != joint_after.matrix.shape:
        raise DimensionError(f"unitary shape {u.shape} does not match state {joint_after.matrix.shape}")
    out = BipartiteState._trusted(u @ joint_after.matrix @ u.conj().T, *joint_after.dims)
    return partial_trace(out, "A")


def kraus_from_environment(u, env, dim_a: int = 2, cutoff: float = 1e-14) -> list[np.ndarray]:
    """Kraus matrices sqrt(p_nu) <mu|U|nu> over the eigenbasis of the environment state.

    Matrices with negligible norm are dropped.
    """
    env = as_density(env)
    db = env.dim
    u = np.asarray(u, dtype=complex).reshape(dim_a, db, dim_a, db)
    p, vecs = np.linalg.eigh(env.data)
    ops = []
    for nu in range(db):
        if p[nu] <= 0:
            continue
        for mu in range(db):
            # <mu| U |nu> on the system, with |mu> the environment's computational basis
            m = np.sqrt(p[nu]) * np.einsum("ikl,l->ik", u[:, mu, :, :], vecs[:, nu])
            if np.linalg.norm(m) > cutoff:
                ops.append(m)
    return ops


def apply_kraus(ops, rho) -> np.ndarray:
    rho = np.asarray(rho)
    return sum(m @ rho @ m.conj().T for m in ops)


# ---------------------------------------------------------------------------
# Reconstruction
# ---------------------------------------------------------------------------

def operator_basis(d: int = 2) -> list[np.ndarray]:
    """Elementary matrices in column-stacking order: K_{i + d j} = |i><j|."""
    basis = [None] * (d * d)
    for i, j in itertools.product(range(d), repeat=2):
        k = np.zeros((d, d), dtype=complex)
        k[i, j] = 1
        basis[i + d * j] = k
    return basis


def is_complete(states, tol: float = 1e-9) -> bool:
    d = states[0].shape[0]
    mat = np.array([np.asarray(s).ravel() for s in states]).T
    return np.linalg.matrix_rank(mat, tol=tol) == d * d


@dataclass(frozen=True, eq=False)
class ProcessMatrix:
    chi: np.ndarray
    basis: list = field(default_factory=operator_basis)

    @property
    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh((self.chi + self.chi.conj().T) / 2)[::-1]

    @property
    def dim(self) -> int:
        return self.basis[0].shape[0]

    def apply(self, rho) -> np.ndarray:
        rho = np.asarray(rho)
        k = self.basis
        return sum(
            self.chi[m, n] * k[m] @ rho @ k[n].conj().T
            for m in range(len(k)) for n in range(len(k))
        )

    def trace_condition(self) -> np.ndarray:
        """sum_mn chi_mn K_n^H K_m; the identity for trace-preserving processes."""
        k = self.basis
        return sum(
            self.chi[m, n] * k[n].conj().T @ k[m]
            for m in range(len(k)) for n in range(len(k))
        )

    def kraus(self, tol: float = 1e-12) -> list[np.ndarray]:
        w, v = np.linalg.eigh(self.chi)
        return [
            np.sqrt(lam) * sum(v[m, a] * self.basis[m] for m in range(len(self.basis)))
            for a, lam in enumerate(w) if lam > tol
        ]


def reconstruct_chi(probes, outputs) -> ProcessMatrix:
    """Linear inversion of probe -> output pairs into chi.

    Each |j><l| is written as a combination of the probe states; the same
    combination of outputs gives E(|j><l|), and
    chi_{i + d j, k + d l} = <i| E(|j><l|) |k>.
    """
    probes = [np.asarray(p, dtype=complex) for p in probes]
    outputs = [np.asarray(o, dtype=complex) for o in outputs]
    if len(probes) != len(outputs):
        raise ValueError("probes and outputs differ in length")
    d = probes[0].shape[0]
    a = np.array([p.ravel() for p in probes]).T  # (d*d, n)
    if np.linalg.matrix_rank(a, tol=1e-9) < d * d:
        raise ValueError("probe set is not tomographically complete")
    chi = np.zeros((d * d, d * d), dtype=complex)
    for j, l in itertools.product(range(d), repeat=2):
        target = np.zeros((d, d), dtype=complex)
        target[j, l] = 1
        coeffs = np.linalg.lstsq(a, target.ravel(), rcond=None)[0]
        e_jl = sum(c * o for c, o in zip(coeffs, outputs))
        for i, k in itertools.product(range(d), repeat=2):
            chi[i + d * j, k + d * l] = e_jl[i, k]
    return ProcessMatrix(chi, operator_basis(d))


def chi_of_kraus(ops) -> ProcessMatrix:
    """Process matrix of an exact channel given by Kraus matrices."""
    d = ops[0].shape[0]
    # K_m = |i><j| with m = i + d j, so the coefficient vector is column-stacked M
    vecs = [m.ravel(order="F") for m in ops]
    chi = sum(np.outer(v, v.conj()) for v in vecs)
    return ProcessMatrix(chi, operator_basis(d))


def cp_check(chi: ProcessMatrix, tol: float = CP_TOL) -> tuple[bool, np.ndarray]:
    ev = chi.eigenvalues
    return bool(ev.min() >= -tol), ev


# ---------------------------------------------------------------------------
# End-to-end runs
# ---------------------------------------------------------------------------

def estimate_state_from_shots(rho, shots: int, rng: np.random.Generator) -> np.ndarray:
    """Qubit state estimate from ``shots`` single-shot Pauli X, Y, Z measurements each."""
    rho = np.asarray(rho)
    r = []
    for sigma in PAULI:
        p_up = float(np.clip(np.trace(rho @ (np.eye(2) + sigma) / 2).real, 0.0, 1.0))
        ups = rng.binomial(shots, p_up)
        r.append(2 * ups / shots - 1)
    return (np.eye(2) + np.einsum("p,pij->ij", r, PAULI)) / 2


@dataclass(frozen=True, eq=False)
class TomographyRun:
    initial_joint: BipartiteState
    joint_unitary: np.ndarray
    scheme: PreparationScheme
    probe_states: list
    output_states: list
    env_states: list
    probabilities: list
    chi: ProcessMatrix
    cp_verdict: bool
    eigenvalues: np.ndarray


def run_tomography(joint: BipartiteState, u, scheme: PreparationScheme,
                   shots: int | None = None, seed: int | None = None) -> TomographyRun:
    """Prepare each probe, evolve with ``u``, reduce, and invert into chi.

    With ``shots`` set, each output is replaced by a Pauli-frequency estimate.
    """
    if joint.dims != (2, 2):
        raise DimensionError("tomography runs are defined for a qubit system and qubit environment")
    u = check_unitary(u, 1e-10)
    rng = np.random.default_rng(seed)
    probes, outs, envs, probs = [], [], [], []
    for k in range(len(scheme.probes)):
        probe, after, env, p = prepare(scheme, joint, k)
        out = evolve_and_reduce(after, u).data
        if shots:
            out = estimate_state_from_shots(out, shots, rng)
        probes.append(probe.data)
        outs.append(out)
        envs.append(env.data)
        probs.append(p)
    chi = reconstruct_chi(probes, outs)
    ok, ev = cp_check(chi)
    return TomographyRun(joint, u, scheme, probes, outs, envs, probs, chi, ok, ev)


def lemma2_product_check(joint: BipartiteState, u, schemes) -> dict:
    """Reconstruct chi under several measurement-only probe sets and compare.

    For a product joint state all reconstructions coincide; correlated states
    typically give different chi (reported, not asserted).
    """
    schemes = list(schemes)
    if len(schemes) < 2 or any(s.kind != "measure-only" for s in schemes):
        raise ValueError("need at least two measure-only schemes")
    runs = [run_tomography(joint, u, s) for s in schemes]
    dist = max(
        float(np.max(np.abs(a.chi.chi - b.chi.chi)))
        for a, b in itertools.combinations(runs, 2)
    )
    return {
        "max_chi_distance": dist,
        "chis": [r.chi.chi for r in runs],
        "eigenvalues": [r.eigenvalues for r in runs],
        "cp": [r.cp_verdict for r in runs],
    }
