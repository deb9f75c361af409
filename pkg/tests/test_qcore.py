import numpy as np
import pytest

from bellgen import qcore
from bellgen.analytic import asymptotic_state
from bellgen.model import BellLabel, bell_state
from bellgen.qcore import (
    ID2,
    SIGMA_X,
    SIGMA_Z,
    InvalidStateError,
    hermitian_eig,
    kron,
    partial_trace_ancilla,
    validate_density,
)


def random_hermitian(rng, dim):
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return (g + g.conj().T) / 2


def random_density(rng, dim):
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = g @ g.conj().T
    return rho / np.trace(rho)


class TestKron:
    def test_identity(self):
        assert np.array_equal(kron(ID2, ID2), np.eye(4))

    def test_projector_product(self):
        p1 = np.array([[0, 0], [0, 1]], dtype=complex)
        out = kron(p1, kron(p1, p1))
        expected = np.zeros((8, 8))
        expected[7, 7] = 1.0  # flat index 4n+2m+l of |111>
        assert np.array_equal(out, expected)

    def test_bit_flip_on_most_significant_qubit(self):
        psi10 = np.zeros(4, dtype=complex)
        psi10[2] = 1.0
        out = kron(SIGMA_X, ID2) @ psi10
        expected = np.zeros(4)
        expected[0] = 1.0
        assert np.allclose(out, expected)

    def test_dimension_overflow_rejected(self):
        with pytest.raises(InvalidStateError):
            kron(np.eye(4), np.eye(4))

    def test_associative(self):
        rng = np.random.default_rng(7)
        a = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        b = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        c = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        # the two groupings multiply scalars in different orders
        assert np.allclose(kron(kron(a, b), c), kron(a, kron(b, c)), atol=1e-14)


class TestPartialTraceAncilla:
    def test_product_state(self):
        rho = np.zeros((8, 8), dtype=complex)
        rho[7, 7] = 1.0
        out = partial_trace_ancilla(rho)
        expected = np.zeros((4, 4))
        expected[3, 3] = 1.0
        assert np.allclose(out, expected)

    def test_factorized_ancilla(self):
        phim = bell_state(BellLabel.PHI_MINUS)
        anc = np.array([0, 1], dtype=complex)
        psi = np.kron(anc, phim)
        out = partial_trace_ancilla(np.outer(psi, psi.conj()))
        assert np.allclose(out, np.outer(phim, phim.conj()), atol=1e-12)

    def test_asymptotic_state_reduces_to_bell_diagonal(self):
        out = partial_trace_ancilla(asymptotic_state((1, 1, 1)))
        for label, weight in [
            (BellLabel.PHI_MINUS, 0.5),
            (BellLabel.PHI_PLUS, 0.25),
            (BellLabel.PSI_PLUS, 0.25),
            (BellLabel.PSI_MINUS, 0.0),
        ]:
            v = bell_state(label)
            assert (v.conj() @ out @ v).real == pytest.approx(weight, abs=1e-12)

    def test_rejects_wrong_trace(self):
        with pytest.raises(InvalidStateError):
            partial_trace_ancilla(np.eye(8, dtype=complex))

    def test_preserves_trace_and_hermiticity(self):
        rng = np.random.default_rng(11)
        for _ in range(20):
            rho = random_density(rng, 8)
            out = partial_trace_ancilla(rho)
            assert abs(np.trace(out) - 1.0) < 1e-12
            assert np.max(np.abs(out - out.conj().T)) < 1e-14


class TestHermitianEig:
    def test_sigma_z(self):
        vals, _ = hermitian_eig(SIGMA_Z)
        assert np.allclose(vals, [1, -1])

    def test_sigma_x_eigenvectors(self):
        vals, vecs = hermitian_eig(SIGMA_X)
        assert np.allclose(vals, [1, -1])
        plus = np.array([1, 1]) / np.sqrt(2)
        assert abs(abs(plus.conj() @ vecs[:, 0]) - 1.0) < 1e-12

    def test_quadratic_block(self):
        # quadratic-formula oracle for [[0, 0.5], [0.5, 0.25]]:
        # lambda = (0.25 +- sqrt(0.0625 + 1))/2
        m = np.array([[0, 0.5], [0.5, 0.25]], dtype=complex)
        vals, _ = hermitian_eig(m)
        assert vals[0] == pytest.approx(0.6403882032022076, abs=1e-12)
        assert vals[1] == pytest.approx(-0.3903882032022076, abs=1e-12)

    def test_rejects_non_hermitian(self):
        with pytest.raises(InvalidStateError):
            hermitian_eig(np.array([[0, 1], [0, 0]], dtype=complex))

    def test_reconstruction_and_trace(self):
        rng = np.random.default_rng(3)
        for dim in (2, 4, 8):
            m = random_hermitian(rng, dim)
            vals, vecs = hermitian_eig(m)
            recon = (vecs * vals) @ vecs.conj().T
            assert np.max(np.abs(recon - m)) < 1e-10
            assert abs(np.sum(vals) - np.trace(m).real) < 1e-10
            assert np.all(np.diff(vals) <= 1e-12)


class TestValidateDensity:
    def test_bell_projector_accepted(self):
        v = bell_state(BellLabel.PHI_PLUS)
        rho = np.outer(v, v.conj())
        assert np.allclose(validate_density(rho), rho, atol=1e-14)

    def test_tiny_trace_drift_renormalized(self):
        v = bell_state(BellLabel.PHI_PLUS)
        rho = np.outer(v, v.conj()) * (1 + 1e-11)
        out = validate_density(rho)
        assert abs(np.trace(out) - 1.0) < 1e-15

    def test_negative_eigenvalue_rejected(self):
        rho = np.diag([0.51, 0.5, 0.0, -0.01]).astype(complex)
        with pytest.raises(InvalidStateError, match="positivity"):
            validate_density(rho)

    def test_non_hermitian_rejected(self):
        rho = np.eye(4, dtype=complex) / 4
        rho[0, 1] = 0.5
        with pytest.raises(InvalidStateError, match="Hermiticity"):
            validate_density(rho)
