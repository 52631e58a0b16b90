import numpy as np
import pytest

from tcsense.hilbert import (
    DickeSpace,
    DimensionOverflowError,
    FockSpace,
    OperatorMatrix,
    eigh,
    expm_i,
    fock_operators,
    identity,
    spin_operators,
    tensor,
)


class TestFockOperators:
    def test_smallest_space(self):
        ops = fock_operators(FockSpace(1))
        np.testing.assert_allclose(ops["a"].elements, [[0, 1], [0, 0]])

    def test_ladder_element(self):
        a = fock_operators(FockSpace(2))["a"].elements
        assert a[1, 2] == pytest.approx(np.sqrt(2))

    def test_truncated_commutator(self):
        ops = fock_operators(FockSpace(50))
        a, ad = ops["a"].elements, ops["a_dagger"].elements
        comm = a @ ad - ad @ a
        interior = (comm - np.eye(51))[:50, :50]
        assert np.max(np.abs(interior)) <= 1e-12

    def test_number_diagonal(self):
        num = fock_operators(FockSpace(7))["number"].elements
        np.testing.assert_allclose(num, np.diag(np.arange(8)))

    def test_cutoff_validation(self):
        with pytest.raises(ValueError):
            FockSpace(0)


class TestSpinOperators:
    def test_single_spin_jz(self):
        jz = spin_operators(DickeSpace(1))["jz"].elements
        np.testing.assert_allclose(jz, np.diag([0.5, -0.5]))

    def test_raising_element(self):
        # <j,1|J+|j,0> = sqrt(2) for j = 1
        ops = spin_operators(DickeSpace(2))
        # m = 1, 0, -1 at indices 0, 1, 2
        assert ops["jp"].elements[0, 1] == pytest.approx(np.sqrt(2))

    @pytest.mark.parametrize("n", [1, 2, 6, 17, 64])
    def test_su2_algebra(self, n):
        ops = spin_operators(DickeSpace(n))
        jx, jy, jz = (ops[k].elements for k in ("jx", "jy", "jz"))
        assert np.max(np.abs(jx @ jy - jy @ jx - 1j * jz)) <= 1e-12
        assert np.max(np.abs(jy @ jz - jz @ jy - 1j * jx)) <= 1e-12
        assert np.max(np.abs(jz @ jx - jx @ jz - 1j * jy)) <= 1e-12

    @pytest.mark.parametrize("n", [1, 3, 12])
    def test_casimir(self, n):
        ops = spin_operators(DickeSpace(n))
        jx, jy, jz = (ops[k].elements for k in ("jx", "jy", "jz"))
        j = n / 2
        total = jx @ jx + jy @ jy + jz @ jz
        np.testing.assert_allclose(total, j * (j + 1) * np.eye(n + 1), atol=1e-12 * n * n)

    def test_commutator_jz_jpm(self):
        ops = spin_operators(DickeSpace(5))
        jz, jp, jm = (ops[k].elements for k in ("jz", "jp", "jm"))
        assert np.max(np.abs(jz @ jp - jp @ jz - jp)) <= 1e-14
        assert np.max(np.abs(jz @ jm - jm @ jz + jm)) <= 1e-14


class TestTensor:
    def test_identity(self):
        eye = tensor(identity(FockSpace(1)), identity(DickeSpace(2)))
        np.testing.assert_allclose(eye.elements, np.eye(6))

    def test_diagonal_product(self):
        a = OperatorMatrix(FockSpace(1), np.diag([0.0, 1.0]).astype(complex), hermitian=True)
        b = OperatorMatrix(DickeSpace(1), np.diag([2.0, 3.0]).astype(complex), hermitian=True)
        np.testing.assert_allclose(tensor(a, b).elements, np.diag([0, 0, 2, 3]))

    def test_number_jz_ordering(self):
        # Fock slow: (n, m) = (0,+1/2), (0,-1/2), (1,+1/2), (1,-1/2)
        num = fock_operators(FockSpace(1))["number"]
        jz = spin_operators(DickeSpace(1))["jz"]
        np.testing.assert_allclose(tensor(num, jz).elements, np.diag([0, 0, 0.5, -0.5]))

    def test_overflow_guard(self):
        big = identity(FockSpace(200))
        spin = identity(DickeSpace(63))
        with pytest.raises(DimensionOverflowError):
            tensor(big, spin)


class TestEigh:
    def test_sorted_diagonal(self):
        op = OperatorMatrix(FockSpace(2), np.diag([3.0, 1.0, 2.0]).astype(complex), hermitian=True)
        w, _ = eigh(op)
        np.testing.assert_allclose(w, [1, 2, 3])

    def test_pauli_x(self):
        op = OperatorMatrix(FockSpace(1), np.array([[0, 1], [1, 0]], dtype=complex), hermitian=True)
        w, _ = eigh(op)
        np.testing.assert_allclose(w, [-1, 1])

    def test_reconstruction(self, rng):
        m = rng.standard_normal((50, 50)) + 1j * rng.standard_normal((50, 50))
        m = m + m.conj().T
        op = OperatorMatrix(FockSpace(49), m, hermitian=True)
        w, v = eigh(op)
        assert np.max(np.abs((v * w) @ v.conj().T - m)) <= 1e-10 * np.max(np.abs(m))
        assert np.max(np.abs(v.conj().T @ v - np.eye(50))) <= 1e-10

    def test_rejects_non_hermitian(self):
        op = OperatorMatrix(FockSpace(1), np.array([[0, 1], [0, 0]], dtype=complex))
        with pytest.raises(ValueError):
            eigh(op)

    def test_hermitian_flag_verified(self):
        with pytest.raises(ValueError):
            OperatorMatrix(FockSpace(1), np.array([[0, 1], [0, 0]], dtype=complex), hermitian=True)


class TestExpmI:
    def test_zero_hamiltonian(self):
        h = OperatorMatrix(FockSpace(3), np.zeros((4, 4), dtype=complex), hermitian=True)
        np.testing.assert_allclose(expm_i(h, 1.7).elements, np.eye(4), atol=1e-14)

    def test_jz_phases(self):
        jz = spin_operators(DickeSpace(1))["jz"]
        u = expm_i(jz, np.pi).elements
        np.testing.assert_allclose(np.diag(u), [np.exp(-1j * np.pi / 2), np.exp(1j * np.pi / 2)])

    def test_group_law(self, rng):
        m = rng.standard_normal((20, 20)) + 1j * rng.standard_normal((20, 20))
        h = OperatorMatrix(FockSpace(19), m + m.conj().T, hermitian=True)
        u1 = expm_i(h, 0.31).elements
        u2 = expm_i(h, 0.56).elements
        u12 = expm_i(h, 0.87).elements
        assert np.max(np.abs(u1 @ u2 - u12)) <= 1e-10

    def test_unitary_roundtrip(self, rng):
        m = rng.standard_normal((40, 40)) + 1j * rng.standard_normal((40, 40))
        h = OperatorMatrix(FockSpace(39), m + m.conj().T, hermitian=True)
        u = expm_i(h, 2.3)
        assert u.unitarity_defect() <= 1e-10
