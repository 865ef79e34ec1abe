"""Density operators on finite-dimensional bipartite spaces.

Everything here is dense complex linear algebra on small matrices (total
dimension at most 64). Entropies are in bits.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal, Sequence

import numpy as np

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_TOL = 1e-10
DEGENERACY_TOL = 1e-9
MAX_TOTAL_DIM = 64
MAX_SUBSYSTEM_DIM = 8

Side = Literal["A", "B"]


class StateError(ValueError):
    """A matrix failed one of the density-operator invariants."""

    def __init__(self, report: "ValidationReport"):
        self.report = report
        super().__init__(report.summary())


class DimensionError(ValueError):
    pass


@dataclass(frozen=True)
class ValidationReport:
    dim: int
    hermitian_error: float
    trace_error: float
    min_eigenvalue: float
    failures: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.failures

    @property
    def positivity_deficit(self) -> float:
        return max(0.0, -self.min_eigenvalue)

    def summary(self) -> str:
        if self.ok:
            return "valid density matrix"
        parts = []
        if "hermitian" in self.failures:
            parts.append(f"not Hermitian (max |m - m^H| = {self.hermitian_error:.3g})")
        if "trace" in self.failures:
            parts.append(f"trace off by {self.trace_error:.3g}")
        if "positivity" in self.failures:
            parts.append(f"not positive (min eigenvalue {self.min_eigenvalue:.6g})")
        return "invalid density matrix: " + "; ".join(parts)


def check_matrix(m) -> ValidationReport:
    """Measure how far ``m`` is from being a density matrix."""
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {m.shape}")
    herm_err = float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0
    tr_err = float(abs(np.trace(m) - 1.0))
    min_eig = float(np.linalg.eigvalsh((m + m.conj().T) / 2)[0])
    failures = []
    if herm_err > HERMITIAN_TOL:
        failures.append("hermitian")
    if tr_err > TRACE_TOL:
        failures.append("trace")
    if min_eig < -PSD_TOL:
        failures.append("positivity")
    return ValidationReport(m.shape[0], herm_err, tr_err, min_eig, tuple(failures))


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Validated density operator. Construction raises :class:`StateError`."""

    data: np.ndarray

    def __post_init__(self):
        m = np.array(self.data, dtype=complex)
        report = check_matrix(m)
        if not report.ok:
            raise StateError(report)
        if m.shape[0] > MAX_TOTAL_DIM:
            raise DimensionError(f"dimension {m.shape[0]} exceeds cap {MAX_TOTAL_DIM}")
        m.setflags(write=False)
        object.__setattr__(self, "data", m)

    @classmethod
    def _trusted(cls, m: np.ndarray) -> "DensityMatrix":
        # internal results: symmetrize and renormalize instead of re-validating
        m = np.asarray(m, dtype=complex)
        m = (m + m.conj().T) / 2
        m = m / np.trace(m).real
        m.setflags(write=False)
        obj = object.__new__(cls)
        object.__setattr__(obj, "data", m)
        return obj

    @classmethod
    def from_ket(cls, ket) -> "DensityMatrix":
        v = np.asarray(ket, dtype=complex).ravel()
        v = v / np.linalg.norm(v)
        return cls._trusted(np.outer(v, v.conj()))

    @classmethod
    def maximally_mixed(cls, dim: int) -> "DensityMatrix":
        return cls._trusted(np.eye(dim) / dim)

    @property
    def dim(self) -> int:
        return self.data.shape[0]

    def __array__(self, dtype=None, copy=None):
        return self.data if dtype is None else self.data.astype(dtype)


def validate(m) -> DensityMatrix | ValidationReport:
    """Return a :class:`DensityMatrix` if ``m`` is valid, else the failed report."""
    report = check_matrix(m)
    if not report.ok:
        return report
    return DensityMatrix(m)


def as_density(x) -> DensityMatrix:
    if isinstance(x, DensityMatrix):
        return x
    if isinstance(x, BipartiteState):
        return x.state
    return DensityMatrix(x)


@dataclass(frozen=True, eq=False)
class BipartiteState:
    state: DensityMatrix
    dim_a: int
    dim_b: int

    def __post_init__(self):
        if self.dim_a < 1 or self.dim_b < 1 or self.dim_a * self.dim_b != self.state.dim:
            raise DimensionError(
                f"factorization {self.dim_a}x{self.dim_b} does not match dimension {self.state.dim}"
            )

    @classmethod
    def from_matrix(cls, m, dim_a: int, dim_b: int | None = None) -> "BipartiteState":
        rho = as_density(m)
        if dim_b is None:
            dim_b = rho.dim // dim_a
        return cls(rho, dim_a, dim_b)

    @classmethod
    def _trusted(cls, m, dim_a: int, dim_b: int) -> "BipartiteState":
        return cls(DensityMatrix._trusted(m), dim_a, dim_b)

    @property
    def matrix(self) -> np.ndarray:
        return self.state.data

    @property
    def dims(self) -> tuple[int, int]:
        return (self.dim_a, self.dim_b)

    def reduced(self, keep: Side) -> DensityMatrix:
        return partial_trace(self, keep)

    def swapped(self) -> "BipartiteState":
        """Same state with the subsystem order exchanged (B becomes the first factor)."""
        da, db = self.dims
        t = self.matrix.reshape(da, db, da, db).transpose(1, 0, 3, 2)
        return BipartiteState._trusted(t.reshape(da * db, da * db), db, da)


def tensor_product(a, b, max_dim: int = MAX_TOTAL_DIM) -> BipartiteState:
    a, b = as_density(a), as_density(b)
    if a.dim * b.dim > max_dim:
        raise DimensionError(f"product dimension {a.dim * b.dim} exceeds cap {max_dim}")
    return BipartiteState._trusted(np.kron(a.data, b.data), a.dim, b.dim)


def partial_trace(s: BipartiteState, keep: Side) -> DensityMatrix:
    """Reduced state of subsystem ``keep`` ("A" or "B")."""
    t = s.matrix.reshape(s.dim_a, s.dim_b, s.dim_a, s.dim_b)
    if keep == "A":
        return DensityMatrix._trusted(np.einsum("ijkj->ik", t))
    if keep == "B":
        return DensityMatrix._trusted(np.einsum("ijik->jk", t))
    raise ValueError(f"subsystem label must be 'A' or 'B', got {keep!r}")


@dataclass(frozen=True, eq=False)
class Spectrum:
    eigenvalues: np.ndarray  # descending
    eigenvectors: np.ndarray  # columns
    degenerate: bool
    degenerate_groups: tuple[tuple[int, ...], ...] = field(default=())


def eig_hermitian(m, degeneracy_tol: float = DEGENERACY_TOL) -> Spectrum:
    """Descending eigendecomposition of a Hermitian matrix.

    Eigenvalues closer than ``degeneracy_tol`` are grouped; ``degenerate`` is set
    when any group has more than one member.
    """
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {m.shape}")
    if np.max(np.abs(m - m.conj().T), initial=0.0) > 1e-10:
        raise ValueError("matrix is not Hermitian")
    w, v = np.linalg.eigh((m + m.conj().T) / 2)
    w, v = w[::-1], v[:, ::-1]
    groups: list[list[int]] = []
    for k, lam in enumerate(w):
        if groups and abs(w[groups[-1][-1]] - lam) < degeneracy_tol:
            groups[-1].append(k)
        else:
            groups.append([k])
    return Spectrum(
        eigenvalues=w,
        eigenvectors=v,
        degenerate=any(len(g) > 1 for g in groups),
        degenerate_groups=tuple(tuple(g) for g in groups),
    )


def _xlogx_sum(p: np.ndarray) -> float:
    p = p[p > 0]
    return float(-np.sum(p * np.log2(p)))


def shannon_entropy(p: Sequence[float]) -> float:
    p = np.asarray(p, dtype=float)
    if np.any(p < -1e-12):
        raise ValueError(f"negative probability {p.min():.3g}")
    if abs(p.sum() - 1.0) > 1e-9:
        raise ValueError(f"probabilities sum to {p.sum():.12g}, not 1")
    p = np.clip(p, 0.0, None)
    return max(0.0, _xlogx_sum(p / p.sum()))


def von_neumann_entropy(rho) -> float:
    """S(rho) = -tr rho log2 rho, with tiny negative eigenvalues clamped to 0."""
    m = rho.data if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)
    w = np.linalg.eigvalsh((m + m.conj().T) / 2)
    if w[0] < -PSD_TOL:
        raise StateError(check_matrix(m))
    return max(0.0, _xlogx_sum(np.clip(w, 0.0, None)))


def entropies_batch(mats: np.ndarray) -> np.ndarray:
    """Von Neumann entropies of a stack of Hermitian, possibly unnormalized, PSD matrices.

    Each matrix is normalized by its own trace; zero matrices give 0.
    """
    w = np.clip(np.linalg.eigvalsh(mats), 0.0, None)
    tr = w.sum(axis=-1, keepdims=True)
    q = np.divide(w, tr, out=np.zeros_like(w), where=tr > 0)
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(q > 0, q * np.log2(np.where(q > 0, q, 1.0)), 0.0)
    return np.maximum(-terms.sum(axis=-1), 0.0)


# ---------------------------------------------------------------------------
# Fano form
# ---------------------------------------------------------------------------

def su_generators(d: int) -> np.ndarray:
    """Hermitian traceless generators of SU(d), normalized tr(s_i s_j) = 2 delta_ij.

    For d=2 these are the Pauli matrices (x, y, z); for d=3 the standard
    Gell-Mann matrices lambda_1..lambda_8 in their usual order.
    """
    if d < 2 or d > MAX_SUBSYSTEM_DIM:
        raise DimensionError(f"unsupported subsystem dimension {d}")
    gens = []
    for k in range(1, d):
        for j in range(k):
            s = np.zeros((d, d), dtype=complex)
            s[j, k] = s[k, j] = 1
            a = np.zeros((d, d), dtype=complex)
            a[j, k], a[k, j] = -1j, 1j
            gens += [s, a]
        diag = np.zeros(d)
        diag[:k] = 1
        diag[k] = -k
        gens.append(np.diag(diag * np.sqrt(2 / (k * (k + 1)))).astype(complex))
    return np.array(gens)


PAULI = su_generators(2)
SIGMA_X, SIGMA_Y, SIGMA_Z = PAULI


@dataclass(frozen=True, eq=False)
class FanoDecomposition:
    alpha: np.ndarray
    beta: np.ndarray
    gamma: np.ndarray
    generators_a: np.ndarray
    generators_b: np.ndarray

    @property
    def dims(self) -> tuple[int, int]:
        return self.generators_a.shape[1], self.generators_b.shape[1]

    def reassemble(self) -> np.ndarray:
        da, db = self.dims
        ga, gb = self.generators_a, self.generators_b
        m = np.eye(da * db, dtype=complex)
        m += np.kron(np.einsum("i,ikl->kl", self.alpha, ga), np.eye(db))
        m += np.kron(np.eye(da), np.einsum("j,jkl->kl", self.beta, gb))
        m += np.einsum("ij,ikl,jmn->kmln", self.gamma, ga, gb).reshape(da * db, da * db)
        return m / (da * db)


def fano_decompose(s: BipartiteState) -> FanoDecomposition:
    da, db = s.dims
    ga, gb = su_generators(da), su_generators(db)
    t = s.matrix.reshape(da, db, da, db)
    # tr[(g_i x g_j) rho] via the reshaped tensor
    ab = np.einsum("ilk,jnm,kmln->ij", ga, gb, t).real
    rho_a = partial_trace(s, "A").data
    rho_b = partial_trace(s, "B").data
    alpha = da / 2 * np.einsum("ilk,kl->i", ga, rho_a).real
    beta = db / 2 * np.einsum("jnm,mn->j", gb, rho_b).real
    gamma = da * db / 4 * ab
    return FanoDecomposition(alpha, beta, gamma, ga, gb)


def correlation_tensor(f: FanoDecomposition) -> np.ndarray:
    da, db = f.dims
    return (f.gamma - np.outer(f.alpha, f.beta)) / (da * db)


def commutator_norm(a: np.ndarray, b: np.ndarray) -> float:
    """Largest singular value of [a, b]."""
    c = a @ b - b @ a
    return float(np.linalg.norm(c, 2)) if c.size else 0.0
