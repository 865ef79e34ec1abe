"""Named state families: the nine teahouse states and the local-distinguishability table."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .discord import d1, is_zero_discord
from .states import SIGMA_X, SIGMA_Z, BipartiteState

SQRT2 = np.sqrt(2.0)


@dataclass(frozen=True, eq=False)
class StateEnsemble:
    weights: np.ndarray
    vectors: np.ndarray  # rows are kets on the joint space
    dims: tuple[int, int]
    labels: tuple[str, ...] = ()

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        v = np.asarray(self.vectors, dtype=complex)
        if abs(w.sum() - 1.0) > 1e-12 or np.any(w < 0):
            raise ValueError("ensemble weights must be non-negative and sum to 1")
        if v.shape != (len(w), self.dims[0] * self.dims[1]):
            raise ValueError(f"vectors have shape {v.shape}, expected ({len(w)}, {self.dims[0] * self.dims[1]})")
        if np.max(np.abs(np.linalg.norm(v, axis=1) - 1.0)) > 1e-12:
            raise ValueError("ensemble members must be normalized")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "vectors", v)

    @property
    def members(self) -> list[tuple[float, np.ndarray]]:
        return list(zip(self.weights, self.vectors))

    def reweighted(self, weights) -> "StateEnsemble":
        return StateEnsemble(np.asarray(weights, float), self.vectors, self.dims, self.labels)

    def mapped(self, u) -> "StateEnsemble":
        return StateEnsemble(self.weights, self.vectors @ np.asarray(u).T, self.dims, self.labels)


def _factor(coeffs: tuple[int, int, int], halved: bool) -> np.ndarray:
    # integer amplitudes, optionally over sqrt(2); converted to floats once here
    v = np.array(coeffs, dtype=float)
    return v / SQRT2 if halved else v


# (A amplitudes, A over sqrt2?, B amplitudes, B over sqrt2?, label)
_TEAHOUSE = (
    ((0, 1, 0), False, (0, 1, 0), False, "|1>|1>"),
    ((1, 0, 0), False, (1, 1, 0), True, "|0>|0+1>"),
    ((1, 0, 0), False, (1, -1, 0), True, "|0>|0-1>"),
    ((0, 0, 1), False, (0, 1, 1), True, "|2>|1+2>"),
    ((0, 0, 1), False, (0, 1, -1), True, "|2>|1-2>"),
    ((0, 1, 1), True, (1, 0, 0), False, "|1+2>|0>"),
    ((0, 1, -1), True, (1, 0, 0), False, "|1-2>|0>"),
    ((1, 1, 0), True, (0, 0, 1), False, "|0+1>|2>"),
    ((1, -1, 0), True, (0, 0, 1), False, "|0-1>|2>"),
)

# heavier weight on two members with non-orthogonal A parts (|0> and |0+1>)
TEAHOUSE_UNEQUAL_WEIGHTS = np.array([0.1, 0.15, 0.1, 0.1, 0.1, 0.1, 0.1, 0.15, 0.1])


def teahouse_factors() -> list[tuple[np.ndarray, np.ndarray]]:
    return [(_factor(a, ha), _factor(b, hb)) for a, ha, b, hb, _ in _TEAHOUSE]


def teahouse_states(weights=None) -> StateEnsemble:
    """The nine orthogonal 3x3 product states, equal weights unless given."""
    vecs = np.array([np.kron(a, b) for a, b in teahouse_factors()])
    w = np.full(9, 1 / 9) if weights is None else np.asarray(weights, float)
    return StateEnsemble(w, vecs, (3, 3), tuple(t[-1] for t in _TEAHOUSE))


def ensemble_density(e: StateEnsemble) -> BipartiteState:
    rho = np.einsum("k,ki,kj->ij", e.weights, e.vectors, e.vectors.conj())
    return BipartiteState._trusted(rho, *e.dims)


def product_biorthogonal_pair() -> StateEnsemble:
    return StateEnsemble([0.5, 0.5], [[1, 0, 0, 0], [0, 0, 0, 1]], (2, 2), ("|00>", "|11>"))


def entangled_pair(weights=(0.6, 0.4)) -> StateEnsemble:
    phi_p = np.array([1, 0, 0, 1]) / SQRT2
    phi_m = np.array([1, 0, 0, -1]) / SQRT2
    return StateEnsemble(weights, [phi_p, phi_m], (2, 2), ("|Phi+>", "|Phi->"))


@dataclass
class Table1Row:
    name: str
    ensemble: StateEnsemble
    locally_distinguishable: bool  # annotation from the literature, not computed
    expected: str  # "zero" or "nonzero"
    representative: bool  # True when weights/pair are our own choice


def table1_rows() -> list[Table1Row]:
    return [
        Table1Row("9 teahouse states, equal weights", teahouse_states(), False, "zero", False),
        Table1Row("2 product bi-orthogonal states", product_biorthogonal_pair(), True, "zero", True),
        Table1Row("2 entangled orthogonal states", entangled_pair(), True, "nonzero", True),
        Table1Row(
            "9 teahouse states, unequal weights",
            teahouse_states(TEAHOUSE_UNEQUAL_WEIGHTS), False, "nonzero", True,
        ),
    ]


def table1_report(optimize: bool = True) -> list[dict]:
    """Zero/nonzero discord on both sides for each row, plus the static annotation.

    ``d1_A`` is the optimized discord on side A (skipped when ``optimize`` is
    False); a nonzero verdict is certified if either the commutator norm
    exceeds 1e-6 or the optimized D1 exceeds 1e-4.
    """
    out = []
    for row in table1_rows():
        rho = ensemble_density(row.ensemble)
        za, zb = is_zero_discord(rho, "A"), is_zero_discord(rho, "B")
        d1a = d1(rho, "A").value if optimize else None
        if za.is_zero and zb.is_zero:
            verdict = "zero"
        else:
            certified = za.commutator_norm > 1e-6 or (d1a is not None and d1a > 1e-4)
            verdict = "nonzero" if certified else "uncertified"
        out.append({
            "states": row.name,
            "zero_A": za.is_zero,
            "zero_B": zb.is_zero,
            "commutator_A": za.commutator_norm,
            "commutator_B": zb.commutator_norm,
            "decided_by_A": za.decided_by,
            "d1_A": d1a,
            "discord": verdict,
            "expected": row.expected,
            "locally_distinguishable": row.locally_distinguishable,
            "representative_choice": row.representative,
            "match": verdict == row.expected,
        })
    return out


# ---------------------------------------------------------------------------
# Named two-qubit states
# ---------------------------------------------------------------------------

QUBIT_KETS = {
    "H": np.array([1, 0], dtype=complex),
    "V": np.array([0, 1], dtype=complex),
    "D": np.array([1, 1], dtype=complex) / SQRT2,
    "A": np.array([1, -1], dtype=complex) / SQRT2,
    "R": np.array([1, 1j], dtype=complex) / SQRT2,
    "L": np.array([1, -1j], dtype=complex) / SQRT2,
}


def qubit_state(label: str) -> np.ndarray:
    """Polarization-labelled qubit state (H, V, D, A, R, L) or "mixed"."""
    if label == "mixed":
        return np.eye(2, dtype=complex) / 2
    try:
        v = QUBIT_KETS[label]
    except KeyError:
        raise ValueError(f"unknown qubit state label {label!r}") from None
    return np.outer(v, v.conj())


def exdisc_state(b: float = 0.5, c: float = 0.5) -> BipartiteState:
    """(1 + b sz x 1 + c sx x sx)/4; raises StateError outside the positive region."""
    m = (np.eye(4) + b * np.kron(SIGMA_Z, np.eye(2)) + c * np.kron(SIGMA_X, SIGMA_X)) / 4
    return BipartiteState.from_matrix(m, 2, 2)


def bell_state() -> BipartiteState:
    v = np.array([1, 0, 0, 1]) / SQRT2
    return BipartiteState.from_matrix(np.outer(v, v), 2, 2)


def lemma1_state() -> BipartiteState:
    """(|00><00| + |11><11|)/2: zero discord on both sides."""
    return BipartiteState.from_matrix(np.diag([0.5, 0, 0, 0.5]), 2, 2)


def separable_input_state(env_label: str = "A") -> BipartiteState:
    """(rho_H x rho_A + rho_D x rho_V)/2, rho_A the antidiagonal polarization |-><-| by default."""
    m = np.kron(qubit_state("H"), qubit_state(env_label)) + np.kron(qubit_state("D"), qubit_state("V"))
    m = m / 2
    return BipartiteState.from_matrix(m, 2, 2)


def product_state(a: str, b: str) -> BipartiteState:
    return BipartiteState.from_matrix(np.kron(qubit_state(a), qubit_state(b)), 2, 2)
