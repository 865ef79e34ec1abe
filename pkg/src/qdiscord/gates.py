"""Two-qubit gates, the CNOT input set, and flip classification of local operations."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .discord import d2
from .ensembles import StateEnsemble, ensemble_density
from .states import SIGMA_X, SIGMA_Y, SIGMA_Z

X_PLUS = np.array([1, 1], dtype=complex) / np.sqrt(2)
X_MINUS = np.array([1, -1], dtype=complex) / np.sqrt(2)
Y_PLUS = np.array([1, 1j], dtype=complex) / np.sqrt(2)
Y_MINUS = np.array([1, -1j], dtype=complex) / np.sqrt(2)
KET0 = np.array([1, 0], dtype=complex)
KET1 = np.array([0, 1], dtype=complex)

HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
PHASE_S = np.diag([1, 1j])


def is_unitary(u, tol: float = 1e-12) -> bool:
    u = np.asarray(u)
    return u.ndim == 2 and u.shape[0] == u.shape[1] and np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))) <= tol


def check_unitary(u, tol: float = 1e-12) -> np.ndarray:
    u = np.asarray(u, dtype=complex)
    if not is_unitary(u, tol):
        raise ValueError("matrix is not unitary")
    return u


def cnot(control: str = "A", target: str = "B") -> np.ndarray:
    """CNOT on qubits A (first factor) and B (second factor)."""
    if {control, target} != {"A", "B"}:
        raise ValueError(f"control/target must be distinct labels from A, B; got {control!r}, {target!r}")
    u = np.zeros((4, 4))
    for a in range(2):
        for b in range(2):
            if control == "A":
                u[a * 2 + (b ^ a), a * 2 + b] = 1
            else:
                u[(a ^ b) * 2 + b, a * 2 + b] = 1
    return u.astype(complex)


def l_set() -> list[tuple[np.ndarray, np.ndarray]]:
    """Input/expected-output pairs a-d for CNOT (control A, target B)."""
    k = np.kron
    return [
        (k(KET1, Y_PLUS), 1j * k(KET1, Y_MINUS)),
        (k(KET0, Y_PLUS), k(KET0, Y_PLUS)),
        (k(Y_PLUS, X_MINUS), k(Y_MINUS, X_MINUS)),
        (k(Y_PLUS, X_PLUS), k(Y_PLUS, X_PLUS)),
    ]


L_LABELS = ("a", "b", "c", "d")


def verify_gate_on_set(g, pairs, tol: float = 1e-10) -> dict:
    g = np.asarray(g)
    fids = [float(abs(np.vdot(out, g @ inp)) ** 2) for inp, out in pairs]
    return {
        "fidelities": fids,
        "passed": [f >= 1 - tol for f in fids],
        "all_passed": all(f >= 1 - tol for f in fids),
        "max_deficit": max(1 - f for f in fids),
    }


@dataclass(frozen=True)
class FlipType:
    tag: str  # "F", "N" or "undetermined"
    phase: complex | None = None


def classify_flip(u, tol: float = 1e-9) -> FlipType:
    """F if u|Y+> = phase |Y->, N if u|Y+> = phase |Y+>, otherwise undetermined."""
    u = check_unitary(u, 1e-10)
    out = u @ Y_PLUS
    flip = np.vdot(Y_MINUS, out)
    keep = np.vdot(Y_PLUS, out)
    if abs(abs(flip) - 1) <= tol:
        return FlipType("F", complex(flip))
    if abs(abs(keep) - 1) <= tol:
        return FlipType("N", complex(keep))
    return FlipType("undetermined")


def reset_unitary() -> np.ndarray:
    """sigma_z x sigma_x: maps outputs a and c back to their inputs."""
    return np.kron(SIGMA_Z, SIGMA_X)


def l_set_ensemble(weights=(0.25, 0.25, 0.25, 0.25)) -> StateEnsemble:
    return StateEnsemble(weights, [p[0] for p in l_set()], (2, 2), L_LABELS)


def ensemble_discord_change(g, e: StateEnsemble, **opts) -> dict:
    """One-sided and symmetric D2 of the ensemble density before and after ``g``."""
    before = ensemble_density(e)
    after = ensemble_density(e.mapped(g))
    out = {}
    for name, s in (("before", before), ("after", after)):
        a, b = d2(s, "A", **opts).value, d2(s, "B", **opts).value
        out[name] = {"d2_A": a, "d2_B": b, "symmetric": min(a, b)}
    return out


PAULIS = {"I": np.eye(2, dtype=complex), "X": SIGMA_X, "Y": SIGMA_Y, "Z": SIGMA_Z}
