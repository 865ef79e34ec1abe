"""Matrix files and deterministic JSON reports.

Matrix format: ``{"dim": n, "re": [[...]], "im": [[...]]}``, row-major.
State files may add ``"dims": [d_A, d_B]``; without it a square total
dimension is split evenly.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .states import BipartiteState, DimensionError

SIG_DIGITS = 9
CHOP = 1e-14  # round-off below this prints as 0


class InputFileError(ValueError):
    """File missing, unreadable, or not in the matrix format."""


def matrix_to_json(m, dims=None) -> dict:
    m = np.asarray(m, dtype=complex)
    out = {"dim": int(m.shape[0]), "re": m.real.tolist(), "im": m.imag.tolist()}
    if dims is not None:
        out["dims"] = [int(d) for d in dims]
    return out


def matrix_from_json(obj) -> np.ndarray:
    try:
        n = int(obj["dim"])
        re = np.array(obj["re"], dtype=float)
        im = np.array(obj.get("im", np.zeros((n, n))), dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputFileError(f"not a matrix object: {exc}") from exc
    if re.shape != (n, n) or im.shape != (n, n):
        raise InputFileError(f"matrix entries do not match dim={n}")
    return re + 1j * im


def load_matrix(path) -> tuple[np.ndarray, list[int] | None]:
    try:
        obj = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise InputFileError(f"cannot read {path}: {exc}") from exc
    return matrix_from_json(obj), obj.get("dims") if isinstance(obj, dict) else None


def load_state(path) -> BipartiteState:
    """Read a bipartite state; raises StateError on invariant violations."""
    m, dims = load_matrix(path)
    if dims is None:
        root = math.isqrt(m.shape[0])
        if root * root != m.shape[0]:
            raise InputFileError(f"{path}: dimension {m.shape[0]} needs an explicit 'dims' entry")
        dims = [root, root]
    try:
        return BipartiteState.from_matrix(m, int(dims[0]), int(dims[1]))
    except DimensionError as exc:
        raise InputFileError(str(exc)) from exc


def _fmt(x: float):
    if not math.isfinite(x):
        return None
    if abs(x) < CHOP:
        return 0.0
    return float(f"{x:.{SIG_DIGITS}g}") + 0.0  # +0.0 drops negative zero


def to_jsonable(obj):
    """Recursively convert numpy values, complex numbers and matrices to JSON types."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return _fmt(float(obj))
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": _fmt(obj.real), "im": _fmt(obj.imag)}
    if isinstance(obj, np.ndarray):
        if np.iscomplexobj(obj):
            if obj.ndim == 2 and obj.shape[0] == obj.shape[1]:
                return to_jsonable(matrix_to_json(obj))
            return {"re": to_jsonable(obj.real.tolist()), "im": to_jsonable(obj.imag.tolist())}
        return to_jsonable(obj.tolist())
    return obj


@dataclass
class ReportBundle:
    command: str
    inputs: dict
    results: dict
    provenance: list = field(default_factory=list)
    tool_version: str = __version__

    def to_dict(self) -> dict:
        return to_jsonable({
            "command": self.command,
            "inputs": self.inputs,
            "results": self.results,
            "provenance": self.provenance,
            "tool_version": self.tool_version,
        })

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)
