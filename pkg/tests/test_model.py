import math

import numpy as np
import pytest

from bellgen.model import (
    BellLabel,
    ControlState,
    FeedbackMode,
    ModelParams,
    ancilla_bell_state,
    basis_state,
    bell_state,
    hamiltonian,
    hamiltonian_at,
    projector,
    ramp_u_h,
)
from bellgen.qcore import SIGMA_Z, kron


class TestBasisState:
    @pytest.mark.parametrize("bits,index", [((1, 1, 1), 7), ((1, 1, 0), 6), ((0, 0, 0), 0)])
    def test_flat_index(self, bits, index):
        psi = basis_state(*bits)
        assert psi[index] == 1.0
        assert np.sum(np.abs(psi)) == 1.0

    def test_ancilla_z_expectation(self):
        z_a = kron((np.eye(2) + SIGMA_Z) / 2, np.eye(4, dtype=complex))
        for m in (0, 1):
            for l in (0, 1):
                psi = basis_state(0, m, l)
                assert (psi.conj() @ z_a @ psi).real == pytest.approx(0.0)
                psi = basis_state(1, m, l)
                assert (psi.conj() @ z_a @ psi).real == pytest.approx(1.0)


class TestBellState:
    def test_phi_minus_amplitudes(self):
        s = 1 / math.sqrt(2)
        assert np.allclose(bell_state(BellLabel.PHI_MINUS), [-s, 0, 0, s])

    def test_orthonormal(self):
        labels = list(BellLabel)
        for i, a in enumerate(labels):
            for j, b in enumerate(labels):
                expected = 1.0 if i == j else 0.0
                got = abs(bell_state(a).conj() @ bell_state(b))
                assert got == pytest.approx(expected, abs=1e-14)

    def test_inversion_gives_product_state(self):
        # (|Phi+> + |Phi->)/sqrt(2) = |11>
        psi = (bell_state(BellLabel.PHI_PLUS) + bell_state(BellLabel.PHI_MINUS)) / math.sqrt(2)
        assert np.allclose(psi, [0, 0, 0, 1])


class TestRamp:
    def test_zero_before_trigger(self):
        assert ramp_u_h(0.5, 1.0, 10.0) == 0.0

    def test_half_period_reaches_one(self):
        assert ramp_u_h(5.0, 0.0, 10.0) == pytest.approx(1.0)

    def test_quarter_period_half_way(self):
        assert ramp_u_h(2.5, 0.0, 10.0) == pytest.approx(0.5)

    def test_non_decreasing_then_flat(self):
        t_star, t_f = 1.0, 10.0
        ts = np.linspace(t_star, (t_star + t_f) / 2, 200)
        vals = [ramp_u_h(t, t_star, t_f) for t in ts]
        assert all(b >= a - 1e-14 for a, b in zip(vals, vals[1:]))
        assert all(ramp_u_h(t, t_star, t_f) == 1.0 for t in np.linspace(5.51, 20, 40))

    def test_continuous_variant_reaches_one_at_t_f(self):
        vals = [ramp_u_h(t, 1.0, 10.0, continuous=True) for t in np.linspace(1, 10, 500)]
        assert vals[-1] == pytest.approx(1.0)
        assert all(b >= a - 1e-14 for a, b in zip(vals, vals[1:]))


class TestHamiltonian:
    def test_bell_form_equality(self):
        # H with u_J = 1, u_h = 0 equals the Bell-basis form
        # 2 J_x sigma_x^A (|Phi+><Psi+| + |Psi+><Phi+|) lifted to 8 dims.
        h = hamiltonian(0.0, ModelParams(), ControlState(u_j=1.0))
        phip = bell_state(BellLabel.PHI_PLUS)
        psip = bell_state(BellLabel.PSI_PLUS)
        from bellgen.qcore import SIGMA_X

        bc = np.outer(phip, psip.conj()) + np.outer(psip, phip.conj())
        expected = 2.0 * kron(SIGMA_X, bc)
        assert np.max(np.abs(h - expected)) < 1e-14

    def test_field_only_form(self):
        h = hamiltonian_at(0.0, 1.0, ModelParams(h_z=50.0))
        assert np.max(np.abs(h - (-50.0) * kron(SIGMA_Z, np.eye(4)))) < 1e-14
        for m in (0, 1):
            for l in (0, 1):
                psi = basis_state(1, m, l)
                assert np.allclose(h @ psi, -50.0 * psi)

    def test_dark_state(self):
        h = hamiltonian(0.0, ModelParams(), ControlState(u_j=1.0))
        for anc in (0, 1):
            psi = ancilla_bell_state(anc, BellLabel.PHI_MINUS)
            assert np.max(np.abs(h @ psi)) < 1e-14

    def test_hermitian_at_all_times(self):
        ctl = ControlState(
            u_j=1.0, feedback_mode=FeedbackMode.RAMP, t_star=1.0, t_f=10.0
        )
        for t in np.linspace(0, 12, 25):
            h = hamiltonian(t, ModelParams(), ctl)
            assert np.max(np.abs(h - h.conj().T)) == 0.0

    def test_coupling_confined_to_plus_sector(self):
        h = hamiltonian(0.0, ModelParams(), ControlState(u_j=1.0))
        states = {
            (anc, label): ancilla_bell_state(anc, label)
            for anc in (0, 1)
            for label in BellLabel
        }
        coupled = {((1, BellLabel.PHI_PLUS), (0, BellLabel.PSI_PLUS)),
                   ((0, BellLabel.PHI_PLUS), (1, BellLabel.PSI_PLUS))}
        for ka, va in states.items():
            for kb, vb in states.items():
                elem = abs(va.conj() @ h @ vb)
                if (ka, kb) in coupled or (kb, ka) in coupled:
                    assert elem == pytest.approx(2.0)
                else:
                    assert elem < 1e-14


class TestProjector:
    def test_keeps_matching_sector(self):
        psi = basis_state(1, 1, 1)
        assert np.allclose(projector(1) @ psi, psi)
        assert np.max(np.abs(projector(0) @ psi)) == 0.0

    def test_completeness_and_idempotence(self):
        p0, p1 = projector(0), projector(1)
        assert np.array_equal(p0 + p1, np.eye(8))
        assert np.array_equal(p0 @ p0, p0)
        assert np.array_equal(p1 @ p1, p1)
