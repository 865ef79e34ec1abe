import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import entropy_bits, ptrace_loop, qubit_grid_discords
from qdiscord.discord import (
    d1, d1_given_basis, d2, d2_given_basis, d3, is_zero_discord, j_given_basis,
    mutual_information, qutrit_unitary, symmetric_d2,
)
from qdiscord.ensembles import bell_state, ensemble_density, exdisc_state, lemma1_state, teahouse_states
from qdiscord.measurement import basis_from_bloch, basis_from_unitary
from qdiscord.sampling import random_classical_quantum, random_density, random_ket, random_unitary
from qdiscord.states import BipartiteState, DimensionError, tensor_product

seeds = st.integers(0, 2**32 - 1)
PZ = basis_from_bloch(0, 0)
PX = basis_from_bloch(np.pi / 2, 0)


def h2(p):
    return -(p * np.log2(p) + (1 - p) * np.log2(1 - p))


def product(rng, da=2, db=2):
    return tensor_product(random_density(da, rng), random_density(db, rng))


def pure(rng, da=2, db=2):
    v = random_ket(da * db, rng)
    return BipartiteState.from_matrix(np.outer(v, v.conj()), da, db)


def exdisc_closed_forms(b, c):
    """S_A, S_AB and S_A + 1 - S_AB for the exdisc family in bits."""
    s_a = h2((1 + b) / 2)
    ev = []
    for sx in (1, -1):
        # rho is block diagonal in (|0 s>, |1 s>) with s an eigenvector of sigma_x
        blk = np.array([[1 + b, c * sx], [c * sx, 1 - b]]) / 4
        ev.extend(np.linalg.eigvalsh(blk))
    ev = np.array(ev)
    s_ab = float(-(ev[ev > 0] * np.log2(ev[ev > 0])).sum())
    return s_a, s_ab


class TestMutualInformation:
    def test_product(self):
        assert mutual_information(product(np.random.default_rng(0))) == pytest.approx(0, abs=1e-12)

    def test_bell(self):
        assert mutual_information(bell_state()) == pytest.approx(2.0, abs=1e-12)

    def test_lemma1(self):
        assert mutual_information(lemma1_state()) == pytest.approx(1.0, abs=1e-12)


class TestFixedBasis:
    def test_j_product(self):
        s = product(np.random.default_rng(1))
        assert j_given_basis(s, basis_from_bloch(0.3, 1.1)) == pytest.approx(0, abs=1e-12)

    def test_j_exdisc(self):
        s = exdisc_state(0.5, 0.5)
        assert j_given_basis(s, PZ) == pytest.approx(0, abs=1e-12)
        assert j_given_basis(s, PX) == pytest.approx(1 - h2(0.75), abs=1e-12)
        assert 1 - h2(0.75) == pytest.approx(0.188722, abs=1e-6)

    def test_d1_bell_any_basis(self):
        rng = np.random.default_rng(2)
        for _ in range(5):
            b = basis_from_unitary(random_unitary(2, rng))
            assert d1_given_basis(bell_state(), b) == pytest.approx(1.0, abs=1e-12)

    def test_d1_exdisc_x(self):
        s = exdisc_state(0.5, 0.5)
        expect = mutual_information(s) - (1 - h2(0.75))
        assert d1_given_basis(s, PX) == pytest.approx(expect, abs=1e-12)

    def test_d2_is_d1_plus_outcome_gap(self):
        s = exdisc_state(0.5, 0.5)
        # outcomes of Pi^z have probabilities (3/4, 1/4) and S_A = H(3/4)
        assert d2_given_basis(s, PZ) == pytest.approx(d1_given_basis(s, PZ), abs=1e-12)


class TestExdisc:
    """Optimized values against closed forms and a brute-force Bloch grid."""

    def setup_method(self):
        self.s = exdisc_state(0.5, 0.5)
        self.s_a, self.s_ab = exdisc_closed_forms(0.5, 0.5)

    def test_d1_closed_form(self):
        expect = self.s_a + h2(0.75) - self.s_ab
        r = d1(self.s)
        assert r.value == pytest.approx(expect, abs=1e-8)
        assert r.value == pytest.approx(0.021680, abs=1e-6)
        assert abs(abs(r.optimal_basis.vectors[0, 0]) - 1 / np.sqrt(2)) < 1e-4

    def test_d2(self):
        assert d2(self.s).value == pytest.approx(0.199562, abs=1e-6)

    def test_d3_closed_form(self):
        expect = self.s_a + 1 - self.s_ab
        assert d3(self.s).value == pytest.approx(expect, abs=1e-10)
        assert d3(self.s).value == pytest.approx(0.210402, abs=1e-6)

    def test_grid_oracle(self):
        g1, g2, _ = qubit_grid_discords(self.s.matrix, 200, 200)
        assert d1(self.s).value <= g1 + 1e-9 and g1 - d1(self.s).value < 1e-3
        assert d2(self.s).value <= g2 + 1e-9 and g2 - d2(self.s).value < 1e-3

    @pytest.mark.parametrize("b,c", [(0.3, 0.2), (0.1, 0.6), (-0.4, 0.5)])
    def test_d3_z_basis_family(self, b, c):
        s = exdisc_state(b, c)
        s_a, s_ab = exdisc_closed_forms(b, c)
        assert d3(s).value == pytest.approx(s_a + 1 - s_ab, abs=1e-10)

    def test_invalid_parameters(self):
        from qdiscord.states import StateError
        with pytest.raises(StateError):
            exdisc_state(1.2, 0.5)


class TestSpecialStates:
    def test_bell(self):
        for f in (d1, d2, d3):
            assert f(bell_state()).value == pytest.approx(1.0, abs=1e-9)

    def test_product(self):
        s = product(np.random.default_rng(5))
        for f in (d1, d2, d3):
            assert f(s).value == pytest.approx(0, abs=1e-8)

    def test_symmetric_d2(self):
        assert symmetric_d2(bell_state()) == pytest.approx(1.0, abs=1e-9)
        assert symmetric_d2(product(np.random.default_rng(6))) == pytest.approx(0, abs=1e-8)

    @given(seeds)
    @settings(max_examples=10, deadline=None)
    def test_pure_state_equals_entanglement(self, seed):
        s = pure(np.random.default_rng(seed))
        e = entropy_bits(ptrace_loop(s.matrix, 2, 2, "A"))
        assert d1(s).value == pytest.approx(e, abs=1e-7)

    @given(seeds)
    @settings(max_examples=10, deadline=None)
    def test_classical_quantum_zero(self, seed):
        rng = np.random.default_rng(seed)
        s = BipartiteState.from_matrix(random_classical_quantum(2, 2, rng), 2, 2)
        assert d1(s).value < 1e-7
        assert d2(s).value < 1e-7
        assert d3(s).value < 1e-7

    def test_degenerate_reduced_state_flag(self):
        r = d3(bell_state())
        assert r.degenerate
        assert not d3(exdisc_state()).degenerate


class TestQutrit:
    def test_parameterization_unitary(self):
        rng = np.random.default_rng(0)
        for _ in range(5):
            u = qutrit_unitary(rng.uniform(-3, 3, 8))
            assert np.allclose(u.conj().T @ u, np.eye(3), atol=1e-12)

    def test_classical_quantum(self):
        rng = np.random.default_rng(11)
        s = BipartiteState.from_matrix(random_classical_quantum(3, 3, rng), 3, 3)
        assert d1(s, starts=10).value < 1e-6

    def test_pure(self):
        rng = np.random.default_rng(12)
        s = pure(rng, 3, 3)
        e = entropy_bits(ptrace_loop(s.matrix, 3, 3, "A"))
        assert d1(s).value == pytest.approx(e, abs=1e-6)

    def test_not_worse_than_eigenbasis(self):
        rng = np.random.default_rng(13)
        s = BipartiteState.from_matrix(random_density(6, rng), 3, 2)
        assert d1(s, starts=10).value <= d3(s).value + 1e-10

    def test_unsupported_dimension(self):
        with pytest.raises(DimensionError):
            d1(BipartiteState.from_matrix(np.eye(8) / 8, 4, 2))


class TestOrderingAndInvariance:
    @given(seeds)
    @settings(max_examples=15, deadline=None)
    def test_ordering(self, seed):
        s = BipartiteState.from_matrix(random_density(4, np.random.default_rng(seed)), 2, 2)
        v1, v2, v3 = d1(s).value, d2(s).value, d3(s).value
        assert -1e-9 <= v1 <= v2 + 1e-7
        assert v2 <= v3 + 1e-7

    @given(seeds)
    @settings(max_examples=10, deadline=None)
    def test_local_unitary_invariance(self, seed):
        rng = np.random.default_rng(seed)
        s = BipartiteState.from_matrix(random_density(4, rng), 2, 2)
        u = np.kron(random_unitary(2, rng), random_unitary(2, rng))
        t = BipartiteState.from_matrix(u @ s.matrix @ u.conj().T, 2, 2)
        assert d1(t).value == pytest.approx(d1(s).value, abs=1e-7)
        assert d2(t).value == pytest.approx(d2(s).value, abs=1e-7)

    def test_side_b_is_swap(self):
        s = BipartiteState.from_matrix(random_density(4, np.random.default_rng(3)), 2, 2)
        assert d1(s, "B").value == pytest.approx(d1(s.swapped(), "A").value, abs=1e-12)

    def test_deterministic(self):
        s = BipartiteState.from_matrix(random_density(4, np.random.default_rng(4)), 2, 2)
        r1, r2 = d1(s), d1(s)
        assert r1.value == r2.value
        assert r1.parameters == r2.parameters

    def test_canonical_angles(self):
        r = d1(exdisc_state())
        th, ph = r.parameters
        assert 0 <= th <= np.pi / 2 + 1e-12
        assert 0 <= ph < np.pi


class TestZeroDiscord:
    def test_teahouse_equal(self):
        s = ensemble_density(teahouse_states())
        assert is_zero_discord(s, "A").is_zero
        assert is_zero_discord(s, "B").is_zero

    def test_bell_by_structure(self):
        rep = is_zero_discord(bell_state(), "A")
        assert not rep.is_zero
        assert rep.commutator_norm < 1e-12
        assert rep.decided_by != "commutator"

    def test_exdisc_by_commutator(self):
        rep = is_zero_discord(exdisc_state(0.5, 0.5), "A")
        assert not rep.is_zero
        assert rep.decided_by == "commutator"
        assert rep.commutator_norm == pytest.approx(0.0625, abs=1e-12)

    def test_exdisc_zero_on_b(self):
        assert is_zero_discord(exdisc_state(0.5, 0.5), "B").is_zero

    def test_lemma1(self):
        for side in "AB":
            rep = is_zero_discord(lemma1_state(), side)
            assert rep.is_zero
            recon = sum(p * np.kron(pi, rb) for p, pi, rb in rep.decomposition)
            assert np.allclose(recon, lemma1_state().matrix, atol=1e-12)

    @given(seeds, st.integers(2, 3), st.integers(2, 3))
    @settings(max_examples=30, deadline=None)
    def test_classical_quantum_detected(self, seed, da, db):
        rng = np.random.default_rng(seed)
        s = BipartiteState.from_matrix(random_classical_quantum(da, db, rng), da, db)
        assert is_zero_discord(s, "A").is_zero

    def test_degenerate_classical_quantum(self):
        # equal weights make rho_A degenerate; the eigenbasis alone is not enough
        u = random_unitary(2, np.random.default_rng(8))
        rbs = [np.diag([0.9, 0.1]), np.diag([0.2, 0.8])]
        m = sum(0.5 * np.kron(np.outer(u[:, a], u[:, a].conj()), rbs[a]) for a in range(2))
        rep = is_zero_discord(BipartiteState.from_matrix(m, 2, 2), "A")
        assert rep.is_zero
        assert rep.decided_by in ("product-eigenvectors", "commuting-marginals")

    @given(seeds)
    @settings(max_examples=20, deadline=None)
    def test_generic_state_nonzero(self, seed):
        s = BipartiteState.from_matrix(random_density(4, np.random.default_rng(seed)), 2, 2)
        assert not is_zero_discord(s, "A").is_zero
