import numpy as np
import pytest

from conftest import random_hermitian, random_psd, random_unitary
from qmeas import linalg
from qmeas.errors import BadDimension, BadSplit, NonSquare, NotHermitian, NotPsd
from qmeas.linalg import I2, X, Y, Z

KET = {b: np.eye(4)[int(b, 2)].astype(complex) for b in ("00", "01", "10", "11")}


class TestKron:
    def test_identity(self):
        assert np.array_equal(linalg.kron(I2, I2), np.eye(4))

    def test_zz_signs_on_basis_states(self):
        # Z x Z keeps even-parity basis vectors and flips the sign of odd ones
        zz = linalg.kron(Z, Z)
        assert np.allclose(zz @ KET["00"], KET["00"])
        assert np.allclose(zz @ KET["11"], KET["11"])
        assert np.allclose(zz @ KET["01"], -KET["01"])
        assert np.allclose(zz @ KET["10"], -KET["10"])

    def test_projector_with_identity_trace(self):
        p = linalg.kron(np.array([[1, 0], [0, 0]]), I2)
        assert linalg.trace(p) == pytest.approx(2.0)

    def test_mixed_product_property(self, rng):
        a, b, c, d = (rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)) for _ in range(4))
        left = linalg.kron(a, b) @ linalg.kron(c, d)
        assert np.allclose(left, linalg.kron(a @ c, b @ d), atol=1e-12)

    def test_associativity(self, rng):
        a, b, c = (rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)) for _ in range(3))
        lhs = linalg.kron(linalg.kron(a, b), c)
        rhs = linalg.kron(a, linalg.kron(b, c))
        assert np.allclose(lhs, rhs, atol=1e-12)


class TestDagger:
    def test_identity(self):
        assert np.array_equal(linalg.dagger(np.eye(3)), np.eye(3))

    def test_pauli_y_is_hermitian(self):
        assert np.array_equal(linalg.dagger(Y), Y)

    def test_rectangular(self, rng):
        a = rng.normal(size=(3, 2)) + 1j * rng.normal(size=(3, 2))
        d = linalg.dagger(a)
        assert d.shape == (2, 3)
        for i in range(3):
            for j in range(2):
                assert d[j, i] == np.conj(a[i, j])
        assert np.array_equal(linalg.dagger(d), a)


class TestTrace:
    def test_identity(self):
        assert linalg.trace(np.eye(4)) == 4

    def test_rank_one_projector(self, rng):
        v = rng.normal(size=5) + 1j * rng.normal(size=5)
        v /= np.linalg.norm(v)
        assert linalg.trace(np.outer(v, v.conj())) == pytest.approx(1.0)

    def test_zz_traceless(self):
        assert linalg.trace(linalg.kron(Z, Z)) == 0

    def test_rejects_non_square(self):
        with pytest.raises(NonSquare):
            linalg.trace(np.ones((2, 3)))


class TestPartialTrace:
    def test_product_state(self):
        rho = np.outer(KET["00"], KET["00"])
        reduced = linalg.partial_trace(rho, (2, 2), over="a")
        assert np.allclose(reduced, [[1, 0], [0, 0]])

    def test_bell_state_marginal_is_maximally_mixed(self):
        bell = (KET["00"] + KET["11"]) / np.sqrt(2)
        rho = np.outer(bell, bell.conj())
        for side in ("a", "b"):
            assert np.allclose(linalg.partial_trace(rho, (2, 2), over=side),
                               np.eye(2) / 2, atol=1e-12)

    def test_trace_preserved(self, rng):
        for _ in range(20):
            rho = random_psd(8, rng)
            out = linalg.partial_trace(rho, (2, 4), over="a")
            assert np.trace(out) == pytest.approx(np.trace(rho), abs=1e-12)

    def test_rejects_bad_split(self):
        with pytest.raises(BadSplit):
            linalg.partial_trace(np.eye(6), (2, 2), over="a")


class TestEigHermitian:
    def test_pauli_z(self):
        dec = linalg.eig_hermitian(Z)
        assert np.allclose(dec.values, [1, -1])
        assert abs(np.vdot(dec.vectors[:, 0], [1, 0])) == pytest.approx(1.0)
        assert abs(np.vdot(dec.vectors[:, 1], [0, 1])) == pytest.approx(1.0)

    def test_pauli_x(self):
        dec = linalg.eig_hermitian(X)
        plus = np.array([1, 1]) / np.sqrt(2)
        minus = np.array([1, -1]) / np.sqrt(2)
        assert np.allclose(dec.values, [1, -1])
        assert abs(np.vdot(dec.vectors[:, 0], plus)) == pytest.approx(1.0)
        assert abs(np.vdot(dec.vectors[:, 1], minus)) == pytest.approx(1.0)

    def test_zz_degenerate_eigenspaces(self):
        dec = linalg.eig_hermitian(linalg.kron(Z, Z))
        assert np.allclose(dec.values, [1, 1, -1, -1])
        # the +1 eigenspace projector equals the even-parity projector
        plus_vecs = dec.vectors[:, :2]
        proj = plus_vecs @ plus_vecs.conj().T
        expected = np.diag([1, 0, 0, 1]).astype(complex)
        assert np.allclose(proj, expected, atol=1e-10)

    @pytest.mark.parametrize("dim", [2, 3, 5, 8, 16])
    def test_random_reconstruction(self, dim, rng):
        for _ in range(10):
            h = random_hermitian(dim, rng)
            dec = linalg.eig_hermitian(h)
            assert np.max(np.abs(dec.reconstruct() - h)) <= 1e-8
            gram = dec.vectors.conj().T @ dec.vectors
            assert np.max(np.abs(gram - np.eye(dim))) <= 1e-8
            assert np.all(np.diff(dec.values) <= 1e-12)

    def test_medium_dimension(self, rng):
        h = random_hermitian(32, rng)
        dec = linalg.eig_hermitian(h)
        assert np.max(np.abs(dec.reconstruct() - h)) <= 1e-8

    def test_clustered_spectrum(self, rng):
        # nearly degenerate eigenvalues still reconstruct and stay orthonormal
        u = random_unitary(6, rng)
        spread = np.array([1.0, 1.0 + 3e-9, 1.0 + 6e-9, -2.0, -2.0, 0.5])
        h = (u * spread) @ u.conj().T
        dec = linalg.eig_hermitian(h)
        assert np.max(np.abs(dec.reconstruct() - h)) <= 1e-8
        groups = linalg.group_eigenvalues(dec.values, float(np.max(np.abs(h))))
        assert [len(g) for g in groups] == [3, 1, 2]

    def test_rejects_non_hermitian(self):
        with pytest.raises(NotHermitian):
            linalg.eig_hermitian(np.array([[0, 1], [0, 0]], dtype=complex))


class TestSqrtPsd:
    def test_identity(self):
        assert np.allclose(linalg.sqrt_psd(np.eye(3)), np.eye(3))

    def test_projector_is_its_own_root(self, rng):
        v = rng.normal(size=4) + 1j * rng.normal(size=4)
        v /= np.linalg.norm(v)
        p = np.outer(v, v.conj())
        assert np.allclose(linalg.sqrt_psd(p), p, atol=1e-10)

    def test_diagonal(self):
        assert np.allclose(linalg.sqrt_psd(np.diag([4.0, 9.0])), np.diag([2.0, 3.0]))

    def test_random_roundtrip(self, rng):
        for _ in range(50):
            m = random_psd(4, rng)
            s = linalg.sqrt_psd(m)
            assert np.max(np.abs(s @ s - m)) <= 1e-8
            assert np.max(np.abs(s - s.conj().T)) <= 1e-10

    def test_rejects_negative(self):
        with pytest.raises(NotPsd):
            linalg.sqrt_psd(np.diag([1.0, -0.5]))


class TestPauliDecompose:
    def test_zz(self):
        pc = linalg.pauli_decompose(linalg.kron(Z, Z))
        assert pc.coeffs["33"] == pytest.approx(1.0)
        off = [abs(v) for s, v in pc.coeffs.items() if s != "33"]
        assert max(off) <= 1e-12

    def test_identity(self):
        pc = linalg.pauli_decompose(I2)
        assert pc.coeffs["0"] == pytest.approx(1.0)

    def test_hermitian_roundtrip_real_coeffs(self, rng):
        h = random_hermitian(4, rng)
        pc = linalg.pauli_decompose(h)
        assert len(pc.coeffs) == 16
        assert max(abs(v.imag) for v in pc.coeffs.values()) <= 1e-10
        assert np.max(np.abs(linalg.pauli_reconstruct(pc) - h)) <= 1e-10

    def test_arbitrary_matrix_roundtrip(self, rng):
        a = rng.normal(size=(8, 8)) + 1j * rng.normal(size=(8, 8))
        pc = linalg.pauli_decompose(a)
        assert np.max(np.abs(linalg.pauli_reconstruct(pc) - a)) <= 1e-10

    def test_unitary_coefficients_unit_norm(self, rng):
        u = random_unitary(4, rng)
        pc = linalg.pauli_decompose(u)
        norm = sum(abs(v) ** 2 for v in pc.coeffs.values())
        assert norm == pytest.approx(1.0, abs=1e-8)

    def test_rejects_bad_dimension(self):
        with pytest.raises(BadDimension):
            linalg.pauli_decompose(np.eye(3))


class TestValidate:
    def test_hadamard_is_unitary(self):
        assert linalg.validate(linalg.H, "unitary").ok

    def test_rank2_projector(self):
        p = np.diag([1, 0, 0, 1]).astype(complex)
        assert linalg.validate(p, "projector").ok

    def test_density_trace_failure(self):
        report = linalg.validate(np.diag([0.5, 0.6]), "density")
        assert not report.ok
        failed = {c.name: c.deviation for c in report.failures()}
        assert failed["unit trace"] == pytest.approx(0.1)

    def test_psd_failure_quantifies_deviation(self):
        report = linalg.validate(np.diag([1.0, -0.25]), "psd")
        failed = {c.name: c.deviation for c in report.failures()}
        assert failed["positivity"] == pytest.approx(0.25, abs=1e-9)

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            linalg.validate(np.eye(2), "sparkly")


class TestEmbedding:
    def test_embed_matches_vector_application(self, rng):
        gate = random_unitary(4, rng)
        full = linalg.embed_operator(gate, [2, 0], 3)
        for col in range(8):
            basis = np.zeros(8, dtype=complex)
            basis[col] = 1.0
            assert np.allclose(full[:, col],
                               linalg.apply_to_vector(gate, basis, [2, 0], 3),
                               atol=1e-12)

    def test_embed_on_full_register_is_identity_permutation(self, rng):
        gate = random_unitary(4, rng)
        assert np.allclose(linalg.embed_operator(gate, [0, 1], 2), gate)

    def test_dilation_blocks_cover_columns(self, rng):
        u = random_unitary(8, rng)
        blocks = linalg.dilation_blocks(u, 1)
        stacked = np.vstack(blocks)
        assert np.allclose(stacked, u[:, :4])
