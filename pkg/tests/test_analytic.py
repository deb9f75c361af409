import itertools
import math

import numpy as np
import pytest

from bellgen.analytic import (
    ConvergenceError,
    ab_coefficients,
    allone_sequence_probability,
    asymptotic_state,
    asymptotic_state_numeric,
    asymptotic_weights,
    flip,
    post_sequence_state,
)
from bellgen.dynamics import step_unitary
from bellgen.measurement import measure_nonselective, project_outcome
from bellgen.metrics import trace_distance
from bellgen.model import (
    BellLabel,
    ControlState,
    ModelParams,
    ancilla_bell_state,
    basis_state,
    bell_state,
)


def free_unitary(tau):
    return step_unitary(0.0, tau, ModelParams(), ControlState(u_j=1.0))


def channel(rho, tau=0.5):
    u = free_unitary(tau)
    return measure_nonselective(u @ rho @ u.conj().T)


def random_density(rng):
    g = rng.normal(size=(8, 8)) + 1j * rng.normal(size=(8, 8))
    rho = g @ g.conj().T
    return rho / np.trace(rho)


class TestAbCoefficients:
    def test_tau_zero(self):
        c = ab_coefficients(0.0)
        assert c.a == 1.0 and c.b == 0.0

    def test_against_propagator(self):
        for tau in (0.5, math.pi / 4, 1.1):
            c = ab_coefficients(tau)
            u = free_unitary(tau)
            phip1 = ancilla_bell_state(1, BellLabel.PHI_PLUS)
            psip0 = ancilla_bell_state(0, BellLabel.PSI_PLUS)
            assert complex(phip1.conj() @ u @ phip1) == pytest.approx(c.a, abs=1e-12)
            assert complex(psip0.conj() @ u @ phip1) == pytest.approx(c.b, abs=1e-12)

    def test_half_rabi_values(self):
        c = ab_coefficients(0.5)
        assert c.a.real == pytest.approx(0.5403023058681398, abs=1e-12)
        assert abs(c.b) ** 2 == pytest.approx(0.7080734182735712, abs=1e-12)

    def test_full_transfer_point(self):
        c = ab_coefficients(math.pi / 4)
        assert abs(c.a) < 1e-15
        assert abs(c.b) == pytest.approx(1.0, abs=1e-15)


class TestAsymptoticState:
    def test_weights_111(self):
        assert asymptotic_weights((1, 1, 1)) == [
            (1, BellLabel.PHI_MINUS, 0.5),
            (1, BellLabel.PHI_PLUS, 0.25),
            (0, BellLabel.PSI_PLUS, 0.25),
        ]

    def test_weights_110_swaps_sectors(self):
        assert asymptotic_weights((1, 1, 0)) == [
            (1, BellLabel.PSI_MINUS, 0.5),
            (1, BellLabel.PSI_PLUS, 0.25),
            (0, BellLabel.PHI_PLUS, 0.25),
        ]

    def test_weights_000_flips_ancilla(self):
        assert asymptotic_weights((0, 0, 0)) == [
            (0, BellLabel.PHI_MINUS, 0.5),
            (0, BellLabel.PHI_PLUS, 0.25),
            (1, BellLabel.PSI_PLUS, 0.25),
        ]

    @pytest.mark.parametrize("bits", list(itertools.product((0, 1), repeat=3)))
    def test_numeric_fixed_point_matches_table(self, bits):
        psi = basis_state(*bits)
        numeric = asymptotic_state_numeric(np.outer(psi, psi.conj()), 0.5)
        assert trace_distance(numeric, asymptotic_state(bits)) < 1e-10

    def test_fixed_point_converges_immediately(self):
        rho_inf = asymptotic_state((1, 1, 1))
        out = asymptotic_state_numeric(rho_inf, 0.5)
        assert trace_distance(out, rho_inf) < 1e-12

    def test_pathological_tau_rejected(self):
        psi = basis_state(1, 1, 1)
        with pytest.raises(ConvergenceError):
            asymptotic_state_numeric(np.outer(psi, psi.conj()), math.pi / 2, max_iter=500)

    def test_no_psi_minus_weight_from_111(self):
        psi = basis_state(1, 1, 1)
        numeric = asymptotic_state_numeric(np.outer(psi, psi.conj()), 0.5)
        for anc in (0, 1):
            v = ancilla_bell_state(anc, BellLabel.PSI_MINUS)
            assert (v.conj() @ numeric @ v).real < 1e-10


class TestFlip:
    def test_flip_vector(self):
        assert np.allclose(flip(basis_state(1, 1, 1), "B"), basis_state(1, 0, 1))

    def test_involution(self):
        rng = np.random.default_rng(4)
        rho = random_density(rng)
        assert np.allclose(flip(flip(rho, "C"), "C"), rho)

    def test_asymptotic_state_invariant_under_double_flip(self):
        rho_inf = asymptotic_state((1, 1, 1))
        assert np.max(np.abs(flip(flip(rho_inf, "B"), "C") - rho_inf)) < 1e-14

    @pytest.mark.parametrize("qubit", ["B", "C"])
    def test_commutes_with_channel(self, qubit):
        rng = np.random.default_rng(8)
        for _ in range(50):
            rho = random_density(rng)
            lhs = channel(flip(rho, qubit))
            rhs = flip(channel(rho), qubit)
            assert np.max(np.abs(lhs - rhs)) < 1e-12

    def test_ancilla_flip_commutes_with_channel(self):
        rng = np.random.default_rng(13)
        for _ in range(50):
            rho = random_density(rng)
            lhs = channel(flip(rho, "A"))
            rhs = flip(channel(rho), "A")
            assert np.max(np.abs(lhs - rhs)) < 1e-12


class TestPostSequenceState:
    def test_single_one(self):
        psi, prob = post_sequence_state([1], 0.5)
        a = math.cos(1.0)
        n1 = math.sqrt(1 + a * a)
        target = (
            ancilla_bell_state(1, BellLabel.PHI_MINUS)
            + a * ancilla_bell_state(1, BellLabel.PHI_PLUS)
        ) / n1
        assert abs(target.conj() @ psi) ** 2 == pytest.approx(1.0, abs=1e-12)
        assert prob == pytest.approx((1 + a * a) / 2, abs=1e-12)

    def test_one_then_zero(self):
        psi, prob = post_sequence_state([1, 0], 0.5)
        target = ancilla_bell_state(0, BellLabel.PSI_PLUS)
        assert abs(target.conj() @ psi) ** 2 == pytest.approx(1.0, abs=1e-12)
        # absolute probability |a b|^2 / 2 by chaining
        assert prob == pytest.approx((math.cos(1.0) * math.sin(1.0)) ** 2 / 2, abs=1e-12)

    def test_zero_then_one(self):
        psi, prob = post_sequence_state([0, 1], 0.5)
        target = ancilla_bell_state(1, BellLabel.PHI_PLUS)
        assert abs(target.conj() @ psi) ** 2 == pytest.approx(1.0, abs=1e-12)
        assert prob == pytest.approx(math.sin(1.0) ** 2 / 2 * math.sin(1.0) ** 2, abs=1e-12)

    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_exhaustive_against_numeric_chain(self, n):
        u = free_unitary(0.5)
        psi0 = basis_state(1, 1, 1)
        for seq in itertools.product((0, 1), repeat=n):
            psi_cf, p_cf = post_sequence_state(list(seq), 0.5)
            rho = np.outer(psi0, psi0.conj())
            p_num = 1.0
            for i in seq:
                rho, p = project_outcome(u @ rho @ u.conj().T, i)
                p_num *= p
            assert p_cf == pytest.approx(p_num, abs=1e-10)
            assert (psi_cf.conj() @ rho @ psi_cf).real > 1 - 1e-10

    def test_branch_sum_to_one(self):
        total = sum(
            post_sequence_state(list(seq), 0.5)[1]
            for seq in itertools.product((0, 1), repeat=4)
        )
        assert total == pytest.approx(1.0, abs=1e-10)


class TestAllOneProbability:
    def test_small_n(self):
        a2 = math.cos(1.0) ** 2
        assert allone_sequence_probability(1, 0.5) == pytest.approx((1 + a2) / 2, abs=1e-12)
        assert allone_sequence_probability(2, 0.5) == pytest.approx((1 + a2 * a2) / 2, abs=1e-12)

    def test_monotone_to_half(self):
        vals = [allone_sequence_probability(n, 0.5) for n in range(1, 25)]
        assert all(b < a for a, b in zip(vals, vals[1:]))
        assert vals[19] == pytest.approx(0.5, abs=1e-6)
        assert vals[19] == pytest.approx(allone_sequence_probability(20, 0.5), abs=1e-12)
