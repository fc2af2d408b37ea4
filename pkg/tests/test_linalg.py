"""Shifted solves, eigen-oracle, spectral bounds: contracts and residuals."""

import math

import numpy as np
import pytest

from pfexpm import linalg as L
from pfexpm import roots as R
from pfexpm.errors import InvariantViolation, SingularSystem


def lap1d(d):
    a = (
        np.diag(-2.0 * np.ones(d))
        + np.diag(np.ones(d - 1), 1)
        + np.diag(np.ones(d - 1), -1)
    )
    return L.HermitianMatrix(a)


def random_hermitian(rng, d):
    b = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return L.HermitianMatrix((b + b.conj().T) / 2.0)


class TestSpectralBounds:
    def test_interval_semantics(self):
        b = L.SpectralBounds(-4.0, 0.0, exact=False)
        assert b.rho() == 4.0
        assert b.alpha() == 0.0
        b = L.SpectralBounds(-1.0, 3.0, exact=True)
        assert b.rho() == 3.0

    def test_rejects_inverted_interval(self):
        with pytest.raises(InvariantViolation):
            L.SpectralBounds(1.0, -1.0)


class TestHermitianMatrix:
    def test_accepts_hermitian(self):
        a = np.array([[1.0, 2.0 + 1.0j], [2.0 - 1.0j, -3.0]])
        m = L.HermitianMatrix(a)
        assert m.d == 2
        assert not m.is_real()
        assert lap1d(4).is_real()

    def test_rejects_non_hermitian(self):
        with pytest.raises(InvariantViolation):
            L.HermitianMatrix(np.array([[0.0, 1.0], [0.0, 0.0]]))

    def test_tolerance_is_relative_to_scale(self):
        a = 1e6 * np.eye(3)
        a[0, 1] = 1e-8  # 1e-14 relative to the 1e6 scale
        L.HermitianMatrix(a)
        a[0, 1] = 1.0
        with pytest.raises(InvariantViolation):
            L.HermitianMatrix(a)

    def test_rejects_non_square(self):
        with pytest.raises(InvariantViolation):
            L.HermitianMatrix(np.zeros((2, 3)))

    def test_entries_frozen(self):
        m = lap1d(3)
        with pytest.raises(ValueError):
            m.entries[0, 0] = 7.0


class TestShiftedSolve:
    def test_scalar_division(self):
        A = L.HermitianMatrix(np.zeros((1, 1)))
        y = L.shifted_solve(A, 1j, np.array([1.0]))
        assert np.allclose(y, [-1j], rtol=0.0, atol=1e-16)

    def test_diagonal_by_hand(self):
        A = L.HermitianMatrix(np.diag([-1.0, -2.0]))
        y = L.shifted_solve(A, complex(-1.0, 1.0), np.array([1.0, 0.0]))
        want = np.array([1.0 / complex(-2.0, 1.0), 0.0])
        assert np.allclose(y, want, rtol=1e-15, atol=0.0)

    def test_residual_bound_laplacian_all_shifts(self):
        A = lap1d(50)
        v = np.ones(50, dtype=complex)
        for theta in R.default_table(16).thetas_f8():
            y = L.shifted_solve(A, theta, v)
            M = A.entries + theta * np.eye(50)
            res = float(np.linalg.norm(M @ y - v))
            assert res <= L.solve_residual_bound(A, theta, y)

    def test_multiple_right_hand_sides(self):
        A = lap1d(6)
        V = np.eye(6, dtype=complex)[:, :3]
        Y = L.shifted_solve(A, 2j, V)
        assert Y.shape == (6, 3)
        for j in range(3):
            assert np.allclose(Y[:, j], L.shifted_solve(A, 2j, V[:, j]))

    def test_singular_system(self):
        A = L.HermitianMatrix(np.zeros((2, 2)))
        with pytest.raises(SingularSystem):
            L.shifted_solve(A, 0.0, np.ones(2))

    def test_residual_property_random(self):
        # 100 random Hermitian matrices crossed with every shift of the
        # n=16 table; the partial-pivoted solve must meet its contract
        rng = np.random.default_rng(1016)
        thetas = R.default_table(16).thetas_f8()
        for _ in range(100):
            d = int(rng.integers(2, 201))
            A = random_hermitian(rng, d)
            v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
            theta = thetas[int(rng.integers(0, 16))]
            y = L.shifted_solve(A, theta, v)
            M = A.entries + theta * np.eye(d)
            res = float(np.linalg.norm(M @ y - v))
            assert res <= L.solve_residual_bound(A, theta, y)


class TestShiftedInverse:
    def test_zero_matrix(self):
        A = L.HermitianMatrix(np.zeros((2, 2)))
        inv = L.shifted_inverse(A, 1j)
        assert np.allclose(inv, -1j * np.eye(2), rtol=0.0, atol=1e-16)

    def test_diagonal_by_hand(self):
        A = L.HermitianMatrix(np.diag([-1.0]))
        inv = L.shifted_inverse(A, complex(-1.0, -1.0))
        assert np.allclose(inv, [[1.0 / complex(-2.0, -1.0)]], rtol=1e-15)

    def test_inverse_times_matrix_is_identity(self):
        A = lap1d(20)
        theta = complex(-1.5, 2.0)
        inv = L.shifted_inverse(A, theta)
        M = A.entries + theta * np.eye(20)
        assert np.allclose(inv @ M, np.eye(20), atol=1e-12)


class TestEigHermitian:
    def test_diagonal_sorted(self):
        w, U = L.eig_hermitian(L.HermitianMatrix(np.diag([3.0, 1.0, 2.0])))
        assert np.array_equal(w, [1.0, 2.0, 3.0])
        assert U.shape == (3, 3)

    def test_laplacian_closed_form(self):
        d = 30
        A = lap1d(d)
        w, U = L.eig_hermitian(A)
        k = np.arange(1, d + 1)
        want = np.sort(-4.0 * np.sin(k * np.pi / (2.0 * (d + 1))) ** 2)
        assert np.max(np.abs(w - want)) <= 10 * d * np.finfo(float).eps * 4.0

    def test_orthonormality_and_residual(self):
        rng = np.random.default_rng(7)
        A = random_hermitian(rng, 60)
        w, U = L.eig_hermitian(A)
        eps = np.finfo(float).eps
        assert np.linalg.norm(U.conj().T @ U - np.eye(60), "fro") <= 10 * 60 * eps
        fro = np.linalg.norm(A.entries, "fro")
        assert np.linalg.norm(A.entries @ U - U * w, "fro") <= 10 * 60 * eps * fro

    def test_real_eigenvalues_by_type(self):
        rng = np.random.default_rng(8)
        w, _ = L.eig_hermitian(random_hermitian(rng, 10))
        assert w.dtype == np.float64


class TestExpOracle:
    def test_zero_matrix(self):
        E = L.exp_oracle(L.HermitianMatrix(np.zeros((3, 3))))
        assert np.allclose(E, np.eye(3), rtol=0.0, atol=1e-15)

    def test_one_by_one(self):
        E = L.exp_oracle(L.HermitianMatrix(np.diag([-1.0])))
        assert abs(E[0, 0] - math.exp(-1.0)) <= 1e-16

    def test_laplacian_closed_form(self):
        d = 10
        E = L.exp_oracle(lap1d(d))
        i = np.arange(1, d + 1)
        V = np.sqrt(2.0 / (d + 1)) * np.sin(np.outer(i, i) * np.pi / (d + 1))
        lam = -4.0 * np.sin(i * np.pi / (2.0 * (d + 1))) ** 2
        want = (V * np.exp(lam)) @ V.T
        assert np.max(np.abs(E - want)) <= 1e-13

    def test_hermitian_positive_definite(self):
        rng = np.random.default_rng(9)
        A = random_hermitian(rng, 40)
        E = L.exp_oracle(A)
        scale = max(1.0, float(np.max(np.abs(E))))
        assert float(np.max(np.abs(E - E.conj().T))) <= 1e-12 * scale
        assert np.all(np.linalg.eigvalsh((E + E.conj().T) / 2) > 0.0)

    def test_shift_identity(self):
        rng = np.random.default_rng(10)
        A = random_hermitian(rng, 25)
        EA = L.exp_oracle(A)
        for c in (-5.0, -1.0, 2.5, 5.0):
            Ec = L.exp_oracle(L.HermitianMatrix(A.entries + c * np.eye(25)))
            scale = float(np.max(np.abs(Ec)))
            assert np.max(np.abs(Ec - math.exp(c) * EA)) <= 1e-12 * scale

    def test_norm_is_exp_alpha(self):
        rng = np.random.default_rng(11)
        A = random_hermitian(rng, 30)
        w, _ = L.eig_hermitian(A)
        got = L.norm2(L.exp_oracle(A))
        want = math.exp(float(w[-1]))
        assert abs(got - want) <= 1e-12 * want


class TestNormsAndGershgorin:
    def test_norm2_identity(self):
        assert L.norm2(np.eye(7)) == 1.0

    def test_norm2_diagonal(self):
        # the SVD route carries 1 ulp of rounding; the eigen route is exact
        assert math.isclose(L.norm2(np.diag([-3.0, 2.0])), 3.0, rel_tol=4e-16)
        assert L.norm2(L.HermitianMatrix(np.diag([-3.0, 2.0]))) == 3.0

    def test_gershgorin_laplacian_exact_interval(self):
        b = L.gershgorin_bounds(lap1d(40))
        assert b.lo == -4.0
        assert b.hi == 0.0
        assert not b.exact

    def test_gershgorin_diagonal_tight(self):
        b = L.gershgorin_bounds(L.HermitianMatrix(np.diag([-1.0, -7.0, 2.0])))
        assert b.lo == -7.0
        assert b.hi == 2.0

    def test_gershgorin_encloses_spectrum(self):
        rng = np.random.default_rng(12)
        A = random_hermitian(rng, 35)
        w, _ = L.eig_hermitian(A)
        b = L.gershgorin_bounds(A)
        assert b.lo <= w[0] and w[-1] <= b.hi
