"""Discord measures D1, D2, D3 and the zero-discord test.

All quantities are in bits. ``side`` names the measured subsystem.

Qubit optimization runs a Bloch-sphere grid followed by Nelder-Mead refinement
from the best grid points. Qutrit bases are parameterized by three Givens
rotations with phases and refined from random starts.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Literal

import numpy as np
from scipy.optimize import minimize

from .measurement import (
    ProjectiveBasis,
    basis_from_bloch,
    bloch_vector,
    conditional_entropy,
    measure_subsystem,
    outcome_entropy,
    pauli_components,
)
from .states import (
    BipartiteState,
    DimensionError,
    Side,
    commutator_norm,
    eig_hermitian,
    entropies_batch,
    partial_trace,
    von_neumann_entropy,
)

Measure = Literal["d1", "d2", "d3"]

GRID_SHAPE = (64, 128)
REFINE_STARTS = 5
QUTRIT_STARTS = 50
FATOL = 1e-10
TIE_TOL = 1e-10
COMMUTATOR_TOL = 1e-8
ZERO_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class DiscordResult:
    value: float
    optimal_basis: ProjectiveBasis
    measure: str
    side: Side
    optimizer_trace: list = field(default_factory=list)  # (parameters, objective) pairs
    converged: bool = True
    parameters: tuple | None = None  # (theta, phi) for qubit optima
    degenerate: bool = False  # D3 only: reduced state had a degenerate spectrum


@dataclass(frozen=True, eq=False)
class ZeroDiscordReport:
    is_zero: bool
    side: Side
    commutator_norm: float
    decided_by: str
    witness_basis: ProjectiveBasis | None = None
    decomposition: list | None = None  # (p_a, projector, conditional state) triples
    discord_in_witness: float | None = None


def _oriented(s: BipartiteState, side: Side) -> BipartiteState:
    if side == "A":
        return s
    if side == "B":
        return s.swapped()
    raise ValueError(f"subsystem label must be 'A' or 'B', got {side!r}")


# ---------------------------------------------------------------------------
# Fixed-basis quantities
# ---------------------------------------------------------------------------

def mutual_information(s: BipartiteState) -> float:
    """I = S(rho_A) + S(rho_B) - S(rho_AB)."""
    return max(
        0.0,
        von_neumann_entropy(partial_trace(s, "A"))
        + von_neumann_entropy(partial_trace(s, "B"))
        - von_neumann_entropy(s.state),
    )


def j_given_basis(s: BipartiteState, basis: ProjectiveBasis, side: Side = "A") -> float:
    s = _oriented(s, side)
    rec = measure_subsystem(s, basis, "A")
    return von_neumann_entropy(partial_trace(s, "B")) - conditional_entropy(rec)


def d1_given_basis(s: BipartiteState, basis: ProjectiveBasis, side: Side = "A") -> float:
    s = _oriented(s, side)
    rec = measure_subsystem(s, basis, "A")
    return (
        von_neumann_entropy(partial_trace(s, "A"))
        + conditional_entropy(rec)
        - von_neumann_entropy(s.state)
    )


def d2_given_basis(s: BipartiteState, basis: ProjectiveBasis, side: Side = "A") -> float:
    s = _oriented(s, side)
    rec = measure_subsystem(s, basis, "A")
    return outcome_entropy(rec) + conditional_entropy(rec) - von_neumann_entropy(s.state)


# ---------------------------------------------------------------------------
# Objectives
# ---------------------------------------------------------------------------

def _xlog2x(x: np.ndarray) -> np.ndarray:
    x = np.clip(x, 0.0, None)
    return np.where(x > 0, x * np.log2(np.where(x > 0, x, 1.0)), 0.0)


def _xlog2x_scalar(x: float) -> float:
    return x * math.log2(x) if x > 0 else 0.0


def _weighted_entropy_2x2(cond: np.ndarray, p: np.ndarray) -> np.ndarray:
    """sum_s p_s S(cond_s / p_s) for unnormalized 2x2 blocks, via closed-form eigenvalues."""
    a, d = cond[..., 0, 0].real, cond[..., 1, 1].real
    mid = (a + d) / 2
    rad = np.sqrt(((a - d) / 2) ** 2 + np.abs(cond[..., 0, 1]) ** 2)
    s = -_xlog2x(mid + rad) - _xlog2x(mid - rad) + _xlog2x(p)
    return np.sum(s, axis=-1)


class _QubitObjective:
    """Vectorized D1/D2 objectives for a qubit measured on side A."""

    def __init__(self, s: BipartiteState, measure: Measure):
        self.rho_b, self.ts = pauli_components(s)
        self.offset = -von_neumann_entropy(s.state)
        if measure == "d1":
            self.offset += von_neumann_entropy(partial_trace(s, "A"))
        self.with_outcomes = measure == "d2"
        if self.rho_b.shape[0] == 2:
            self._rb = ((self.rho_b[0, 0].real, self.rho_b[0, 1]), (None, self.rho_b[1, 1].real))
            self._t00 = [t[0, 0].real for t in self.ts]
            self._t11 = [t[1, 1].real for t in self.ts]
            self._t01 = [complex(t[0, 1]) for t in self.ts]

    def many(self, thetas: np.ndarray, phis: np.ndarray) -> np.ndarray:
        n = bloch_vector(thetas, phis).T  # (N, 3)
        nt = np.einsum("np,pjl->njl", n, self.ts)
        cond = np.stack([self.rho_b + nt, self.rho_b - nt], axis=1) / 2  # (N, 2, dB, dB)
        p = np.clip(np.einsum("nsjj->ns", cond).real, 0.0, None)
        if cond.shape[-1] == 2:
            val = _weighted_entropy_2x2(cond, p) + self.offset
        else:
            val = np.sum(p * entropies_batch(cond), axis=1) + self.offset
        if self.with_outcomes:
            with np.errstate(divide="ignore", invalid="ignore"):
                h = -np.sum(np.where(p > 0, p * np.log2(np.where(p > 0, p, 1.0)), 0.0), axis=1)
            val = val + h
        return val

    def __call__(self, x) -> float:
        if self.rho_b.shape[0] != 2:
            return float(self.many(np.array([x[0]]), np.array([x[1]]))[0])
        # scalar fast path for a qubit B; same arithmetic as many()
        st, ct = math.sin(x[0]), math.cos(x[0])
        n = (st * math.cos(x[1]), st * math.sin(x[1]), ct)
        (r00, r01), (_, r11) = self._rb
        val = self.offset
        for sign in (1.0, -1.0):
            a = (r00 + sign * sum(ni * t for ni, t in zip(n, self._t00))) / 2
            d = (r11 + sign * sum(ni * t for ni, t in zip(n, self._t11))) / 2
            b = abs(r01 + sign * sum(ni * t for ni, t in zip(n, self._t01))) / 2
            p = max(a + d, 0.0)
            mid, rad = (a + d) / 2, math.hypot((a - d) / 2, b)
            val += -_xlog2x_scalar(mid + rad) - _xlog2x_scalar(mid - rad) + _xlog2x_scalar(p)
            if self.with_outcomes:
                val -= _xlog2x_scalar(p)
        return val


def _canonical_angles(theta: float, phi: float) -> tuple[float, float]:
    """Representative (theta, phi) of the basis {n, -n} with theta in [0, pi/2]."""
    theta = float(np.mod(theta, 2 * np.pi))
    if theta > np.pi:
        theta, phi = 2 * np.pi - theta, phi + np.pi
    if theta > np.pi / 2:
        theta, phi = np.pi - theta, phi + np.pi
    if theta < 1e-12:
        theta, phi = 0.0, 0.0
    phi = float(np.mod(phi, 2 * np.pi))
    if abs(theta - np.pi / 2) < 1e-7 and phi >= np.pi:
        # equatorial n and -n: keep phi in [0, pi)
        phi -= np.pi
    if phi > 2 * np.pi - 1e-12:
        phi = 0.0
    return theta, phi


def _optimize_qubit(s: BipartiteState, measure: Measure, grid=GRID_SHAPE, starts=REFINE_STARTS):
    f = _QubitObjective(s, measure)
    nt, nphi = grid
    th, ph = np.meshgrid(
        np.linspace(0, np.pi, nt), np.linspace(0, 2 * np.pi, nphi, endpoint=False), indexing="ij"
    )
    th, ph = th.ravel(), ph.ravel()
    vals = f.many(th, ph)
    order = np.lexsort((ph, th, np.round(vals, 12)))
    candidates = [(float(vals[k]), *_canonical_angles(th[k], ph[k])) for k in order[:starts]]
    trace = [((c[1], c[2]), c[0]) for c in candidates]
    converged = True
    for k in order[:starts]:
        res = minimize(
            f, x0=[th[k], ph[k]], method="Nelder-Mead",
            options={"xatol": 1e-9, "fatol": FATOL, "maxiter": 4000},
        )
        converged &= bool(res.success)
        t, p = _canonical_angles(*res.x)
        v = f([t, p])
        candidates.append((v, t, p))
        trace.append(((t, p), v))
    best = min(c[0] for c in candidates)
    ties = [c for c in candidates if c[0] <= best + TIE_TOL]
    v, t, p = min(ties, key=lambda c: (c[1], c[2]))
    return v, basis_from_bloch(t, p), (t, p), trace, converged


def _givens(d: int, j: int, k: int, theta: float, phi: float) -> np.ndarray:
    g = np.eye(d, dtype=complex)
    c, s = np.cos(theta), np.sin(theta)
    g[j, j] = g[k, k] = c
    g[j, k] = -np.exp(-1j * phi) * s
    g[k, j] = np.exp(1j * phi) * s
    return g


def qutrit_unitary(x) -> np.ndarray:
    """Unitary from 8 parameters: two relative phases and three Givens rotations."""
    u = np.diag([1.0, np.exp(1j * x[0]), np.exp(1j * x[1])])
    for (j, k), (t, p) in zip(((0, 1), (0, 2), (1, 2)), np.reshape(x[2:8], (3, 2))):
        u = u @ _givens(3, j, k, t, p)
    return u


def _block_unitary(d: int, x) -> np.ndarray:
    if d == 1:
        return np.eye(1, dtype=complex)
    if d == 2:
        return basis_from_bloch(x[0], x[1]).vectors
    if d == 3:
        return qutrit_unitary(x)
    raise DimensionError(f"no basis parameterization for dimension {d}")


_NPARAMS = {1: 0, 2: 2, 3: 8}


def _multistart(objective: Callable, nparams: int, starts: int, seed: int, extra=()):
    """Nelder-Mead from random starts plus fixed seeds; returns the first best found."""
    rng = np.random.default_rng(seed)
    x0s = list(extra) + [rng.uniform(0, 2 * np.pi, nparams) for _ in range(starts)]
    best, trace, converged = None, [], True
    for x0 in x0s:
        res = minimize(
            objective, x0=x0, method="Nelder-Mead",
            options={"xatol": 1e-9, "fatol": FATOL, "maxiter": 400 * nparams},
        )
        converged &= bool(res.success)
        trace.append((tuple(map(float, res.x)), float(res.fun)))
        if best is None or res.fun < best[1] - TIE_TOL:
            best = (res.x, float(res.fun))
    return best[0], best[1], trace, converged


class _BasisObjective:
    """D1/D2 objective as a function of a basis matrix (columns), side A measured."""

    def __init__(self, s: BipartiteState, measure: Measure):
        da, db = s.dims
        self.t = s.matrix.reshape(da, db, da, db)
        self.offset = -von_neumann_entropy(s.state)
        if measure in ("d1", "d3"):
            self.offset += von_neumann_entropy(partial_trace(s, "A"))
        self.with_outcomes = measure == "d2"

    def __call__(self, u: np.ndarray) -> float:
        blocks = np.einsum("ia,ijkl,ka->ajl", u.conj(), self.t, u)
        p = np.clip(np.einsum("ajj->a", blocks).real, 0.0, None)
        val = float(np.dot(p, entropies_batch(blocks))) + self.offset
        if self.with_outcomes:
            q = p[p > 0]
            val -= float(np.sum(q * np.log2(q)))
        return val


def _optimize_general(s: BipartiteState, measure: Measure, starts: int, seed: int):
    f = _BasisObjective(s, measure)

    def objective(x):
        return f(qutrit_unitary(x))

    x, v, trace, converged = _multistart(objective, _NPARAMS[3], starts, seed, extra=[np.zeros(8)])
    basis = ProjectiveBasis(qutrit_unitary(x))
    # the eigenbasis is always a feasible point; never report worse than it
    eig = eig_hermitian(partial_trace(s, "A").data).eigenvectors
    v_eig = f(eig)
    if v_eig < v - TIE_TOL:
        v, basis = v_eig, ProjectiveBasis(eig)
    return v, basis, None, trace, converged


def _optimize(s: BipartiteState, measure: Measure, side: Side, **opts) -> DiscordResult:
    s = _oriented(s, side)
    if s.dim_a == 2:
        v, basis, params, trace, conv = _optimize_qubit(
            s, measure, opts.get("grid", GRID_SHAPE), opts.get("starts", REFINE_STARTS)
        )
    elif s.dim_a == 3:
        v, basis, params, trace, conv = _optimize_general(
            s, measure, opts.get("starts", QUTRIT_STARTS), opts.get("seed", 0)
        )
    else:
        raise DimensionError(f"optimized discord supports measured dimension 2 or 3, got {s.dim_a}")
    return DiscordResult(
        value=v, optimal_basis=basis, measure=measure, side=side,
        optimizer_trace=trace, converged=conv, parameters=params,
    )


def d1(s: BipartiteState, side: Side = "A", **opts) -> DiscordResult:
    """Quantum discord D1: min over projective bases of S(A) + S(B|Pi) - S(AB)."""
    return _optimize(s, "d1", side, **opts)


def d2(s: BipartiteState, side: Side = "A", **opts) -> DiscordResult:
    """D2: min over bases of H(A^Pi) + S(B|Pi) - S(AB)."""
    return _optimize(s, "d2", side, **opts)


def d3(s: BipartiteState, side: Side = "A", seed: int = 0) -> DiscordResult:
    """D3: D1 evaluated in the eigenbasis of the measured reduced state.

    With a degenerate reduced spectrum the eigenbasis is not unique; the
    conditional entropy is then minimized over all eigenbases, i.e. over
    unitaries acting inside each degenerate eigenspace.
    """
    so = _oriented(s, side)
    sp = eig_hermitian(partial_trace(so, "A").data)
    v0 = sp.eigenvectors
    if not sp.degenerate:
        basis = ProjectiveBasis(v0)
        return DiscordResult(d1_given_basis(so, basis), basis, "d3", side)

    groups = sp.degenerate_groups
    sizes = [len(g) for g in groups]
    splits = np.cumsum([_NPARAMS[n] for n in sizes])[:-1]

    def unitary(x):
        u = np.zeros_like(v0)
        for g, xs in zip(groups, np.split(np.asarray(x, float), splits)):
            u[:, list(g)] = v0[:, list(g)] @ _block_unitary(len(g), xs)
        return u

    f = _BasisObjective(so, "d1")

    def objective(x):
        return f(unitary(x))

    nparams = sum(_NPARAMS[n] for n in sizes)
    if all(n <= 2 for n in sizes) and nparams == 2:
        # one degenerate qubit block: small grid then refine
        grid = [(t, p) for t in np.linspace(0, np.pi, 17) for p in np.linspace(0, 2 * np.pi, 32, endpoint=False)]
        vals = [objective(g) for g in grid]
        extra = [np.array(grid[k]) for k in np.argsort(vals, kind="stable")[:3]]
        x, v, trace, conv = _multistart(objective, nparams, 0, seed, extra=extra)
    else:
        x, v, trace, conv = _multistart(objective, nparams, 20, seed, extra=[np.zeros(nparams)])
    return DiscordResult(
        v, ProjectiveBasis(unitary(x)), "d3", side, trace, conv, degenerate=True
    )


def symmetric_d2(s: BipartiteState, **opts) -> float:
    return min(d2(s, "A", **opts).value, d2(s, "B", **opts).value)


# ---------------------------------------------------------------------------
# Zero-discord decision
# ---------------------------------------------------------------------------

def _decomposition(s: BipartiteState, basis: ProjectiveBasis):
    rec = measure_subsystem(s, basis, "A")
    parts = [
        (float(p), basis.projectors[a], rec.conditional_states[a].data)
        for a, p in enumerate(rec.probabilities)
    ]
    err = float(np.max(np.abs(rec.post_state.matrix - s.matrix)))
    return parts, err


def _product_eigenbasis(s: BipartiteState) -> np.ndarray | None:
    """If every eigenvector of rho_AB is a product |a>|b> whose A-parts come
    from one orthonormal basis, return that basis (columns); otherwise None."""
    da, db = s.dims
    sp = eig_hermitian(s.matrix)
    parts = []
    for k in range(da * db):
        m = sp.eigenvectors[:, k].reshape(da, db)
        u, sv, _ = np.linalg.svd(m)
        if sv[1:].max(initial=0.0) > 1e-7:
            return None
        parts.append(u[:, 0])
    basis: list[np.ndarray] = []
    for a in parts:
        overlaps = [abs(np.vdot(b, a)) for b in basis]
        if any(o > 1 - 1e-7 for o in overlaps):
            continue
        if any(o > 1e-7 for o in overlaps) or len(basis) == da:
            return None
        basis.append(a)
    if len(basis) != da:
        return None
    return np.column_stack(basis)


def _commuting_marginals_basis(s: BipartiteState, seed: int = 0) -> np.ndarray | None:
    """Common eigenbasis of the A-side operators tr_B[rho (1 x F)] if they commute.

    rho is classical on A exactly when these operators (over a basis of F)
    commute; a generic real combination then has the shared eigenbasis.
    """
    da, db = s.dims
    t = s.matrix.reshape(da, db, da, db)
    ops = []
    for j in range(db):
        for l in range(db):
            ops.append(t[:, j, :, l])
    herm = [o + o.conj().T for o in ops] + [1j * (o - o.conj().T) for o in ops]
    for a in herm:
        for b in herm:
            if commutator_norm(a, b) > COMMUTATOR_TOL:
                return None
    rng = np.random.default_rng(seed)
    combo = sum(c * h for c, h in zip(rng.normal(size=len(herm)), herm))
    return eig_hermitian(combo, degeneracy_tol=0.0).eigenvectors


def is_zero_discord(s: BipartiteState, side: Side = "A") -> ZeroDiscordReport:
    """Decide whether the state is classical on the measured side.

    Steps: a nonzero commutator [rho_A x 1, rho_AB] rules zero discord out.
    Otherwise, for a non-degenerate rho_A its eigenbasis is the only
    candidate; for a degenerate one the candidate comes from the product
    structure of rho_AB's eigenvectors or, failing that, from the common
    eigenbasis of the A-side marginals. A candidate is accepted only if the
    measured state reassembles rho_AB.
    """
    so = _oriented(s, side)
    rho_a = partial_trace(so, "A").data
    cnorm = commutator_norm(np.kron(rho_a, np.eye(so.dim_b)), so.matrix)
    if cnorm > COMMUTATOR_TOL:
        return ZeroDiscordReport(False, side, cnorm, "commutator")

    sp = eig_hermitian(rho_a)
    if not sp.degenerate:
        candidates = [("eigenbasis", sp.eigenvectors)]
    else:
        candidates = []
        if not eig_hermitian(so.matrix).degenerate:
            candidates.append(("product-eigenvectors", _product_eigenbasis(so)))
        candidates.append(("commuting-marginals", _commuting_marginals_basis(so)))

    for how, u in candidates:
        if u is None:
            continue
        basis = ProjectiveBasis(u)
        parts, err = _decomposition(so, basis)
        if err <= ZERO_TOL:
            return ZeroDiscordReport(
                True, side, cnorm, how, basis, parts, d1_given_basis(so, basis)
            )
    how = candidates[-1][0]
    last = candidates[-1][1]
    witness = d1_given_basis(so, ProjectiveBasis(last)) if last is not None else None
    return ZeroDiscordReport(False, side, cnorm, how, discord_in_witness=witness)
