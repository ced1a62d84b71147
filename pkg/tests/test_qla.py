import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import HH, PHI_PLUS, ket_density, random_hermitian
from eurcoh.errors import DimensionMismatch, InvalidSubsystem, NotHermitian, NotPSD, TraceMismatch
from eurcoh.qla import (
    DensityMatrix,
    eig_hermitian,
    eigvals_hermitian,
    is_valid_density,
    matrix_sqrt_psd,
    partial_trace,
    tensor_product,
    validate_density,
)
from eurcoh.states import KETS, SIGMA_X, SIGMA_Z, bell_diagonal_state


def kron_oracle(a, b):
    """(a x b)[i*m + j, k*n + l] = a[i,k] b[j,l], written out element by element."""
    p, q = a.shape
    m, n = b.shape
    out = np.zeros((p * m, q * n), dtype=complex)
    for i in range(p):
        for k in range(q):
            for j in range(m):
                for l in range(n):
                    out[i * m + j, k * n + l] = a[i, k] * b[j, l]
    return out


def partial_trace_oracle(mat, da, db, keep):
    out = np.zeros((da, da) if keep == 0 else (db, db), dtype=complex)
    for i in range(da):
        for k in range(da):
            for j in range(db):
                for l in range(db):
                    v = mat[i * db + j, k * db + l]
                    if keep == 0 and j == l:
                        out[i, k] += v
                    if keep == 1 and i == k:
                        out[j, l] += v
    return out


complex_mats = st.integers(0, 2**32 - 1).map(lambda s: np.random.default_rng(s))


class TestTensorProduct:
    def test_identity(self):
        assert np.allclose(tensor_product(np.eye(2), np.eye(2)), np.eye(4))

    def test_basis_order(self):
        h = np.outer(KETS["H"], KETS["H"])
        v = np.outer(KETS["V"], KETS["V"])
        assert np.array_equal(tensor_product(h, v), np.diag([0, 1, 0, 0]).astype(complex))

    def test_pauli_against_index_oracle(self):
        assert np.array_equal(tensor_product(SIGMA_X, SIGMA_Z), kron_oracle(SIGMA_X, SIGMA_Z))

    @given(complex_mats, st.integers(1, 3), st.integers(1, 3))
    def test_random_against_index_oracle(self, rng, p, m):
        a = rng.normal(size=(p, p)) + 1j * rng.normal(size=(p, p))
        b = rng.normal(size=(m, m)) + 1j * rng.normal(size=(m, m))
        assert np.allclose(tensor_product(a, b), kron_oracle(a, b), atol=1e-14)

    def test_density_dims_concatenate(self):
        a = ket_density(KETS["H"], (2,))
        out = tensor_product(a, a)
        assert isinstance(out, DensityMatrix) and out.dims == (2, 2)


class TestPartialTrace:
    def test_bell_reduces_to_maximally_mixed(self):
        rho = ket_density(PHI_PLUS)
        assert np.allclose(partial_trace(rho, 1).mat, np.eye(2) / 2)

    def test_product_state(self):
        assert np.allclose(partial_trace(ket_density(HH), 0).mat, np.diag([1, 0]))

    def test_bell_like_30(self):
        out = partial_trace(bell_diagonal_state(1.0, 30.0), 1).mat
        assert np.allclose(out, np.diag([0.75, 0.25]), atol=1e-12)

    @given(complex_mats, st.integers(1, 3), st.integers(1, 3), st.sampled_from([0, 1]))
    def test_against_sum_oracle(self, rng, da, db, keep):
        n = da * db
        z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        rho = DensityMatrix(z @ z.conj().T, (da, db))
        got = partial_trace(rho, keep)
        assert np.allclose(got.mat, partial_trace_oracle(rho.mat, da, db, keep), atol=1e-12)
        assert got.dims == ((da,) if keep == 0 else (db,))

    def test_three_parties(self, rng):
        a, b, c = (np.diag(rng.random(2)) for _ in range(3))
        rho = DensityMatrix(np.kron(np.kron(a, b), c), (2, 2, 2))
        assert np.allclose(partial_trace(rho, [0, 2]).mat, np.kron(a, c) * np.trace(b))

    @pytest.mark.parametrize("keep", [2, -1, [0, 0], []])
    def test_bad_keep(self, keep):
        with pytest.raises(InvalidSubsystem):
            partial_trace(ket_density(HH), keep)

    def test_single_system(self):
        with pytest.raises(InvalidSubsystem):
            partial_trace(ket_density(KETS["H"], (2,)), 0)


class TestEigensolver:
    def test_pauli_x(self):
        spec = eig_hermitian(SIGMA_X)
        assert np.allclose(spec.values, [1, -1])
        assert np.allclose(spec.vectors[:, 0], np.array([1, 1]) / math.sqrt(2))
        assert np.allclose(spec.vectors[:, 1], np.array([1, -1]) / math.sqrt(2))

    def test_scalar(self):
        assert np.allclose(eig_hermitian(np.eye(4) / 4).values, 0.25)
        assert np.allclose(eig_hermitian(np.eye(4) / 4).vectors, np.eye(4))

    def test_rank_two_mixture(self):
        vals = eigvals_hermitian(bell_diagonal_state(0.5, 45.0).mat)
        assert np.allclose(vals, [0.5, 0.5, 0, 0], atol=1e-14)

    @given(complex_mats, st.integers(1, 6))
    def test_reconstruction_and_unitarity(self, rng, n):
        m = random_hermitian(rng, n)
        spec = eig_hermitian(m)
        assert np.max(np.abs(spec.reconstruct() - m)) < 1e-12
        assert np.max(np.abs(spec.vectors.conj().T @ spec.vectors - np.eye(n))) < 1e-12
        assert np.all(np.diff(spec.values) <= 0)

    @given(complex_mats, st.integers(1, 6))
    def test_values_match_lapack(self, rng, n):
        # numpy serves only as an independent check here
        m = random_hermitian(rng, n)
        assert np.allclose(eigvals_hermitian(m), np.linalg.eigvalsh(m)[::-1], atol=1e-12)
        assert np.allclose(eigvals_hermitian(m), eig_hermitian(m).values, atol=1e-12)

    @given(complex_mats)
    def test_phase_convention(self, rng):
        spec = eig_hermitian(random_hermitian(rng, 4))
        for col in spec.vectors.T:
            first = next(x for x in col if abs(x) > 1e-12)
            assert abs(first.imag) < 1e-12 and first.real > 0

    def test_deterministic_output(self, rng):
        m = random_hermitian(rng, 4)
        a, b = eig_hermitian(m), eig_hermitian(m.copy())
        assert np.array_equal(a.values, b.values) and np.array_equal(a.vectors, b.vectors)

    def test_rejects_non_hermitian(self):
        with pytest.raises(NotHermitian):
            eig_hermitian(np.array([[0, 1], [0, 0]], dtype=complex))

    def test_rejects_non_square(self):
        with pytest.raises(DimensionMismatch):
            eigvals_hermitian(np.zeros((2, 3)))

    def test_rejects_nan(self):
        with pytest.raises(NotHermitian):
            eigvals_hermitian(np.array([[np.nan, 0], [0, 1]]))


class TestSqrt:
    def test_identity(self):
        assert np.allclose(matrix_sqrt_psd(np.eye(2)), np.eye(2))

    def test_diagonal(self):
        assert np.allclose(matrix_sqrt_psd(np.diag([0.25, 0.75])), np.diag([0.5, math.sqrt(0.75)]))

    def test_projector(self):
        d = np.outer(KETS["D"], KETS["D"].conj())
        assert np.allclose(matrix_sqrt_psd(d), d, atol=1e-12)

    @given(complex_mats)
    def test_squares_back(self, rng):
        z = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        m = z @ z.conj().T
        r = matrix_sqrt_psd(m)
        assert np.allclose(r @ r, m, atol=1e-10)

    def test_rejects_negative(self):
        with pytest.raises(NotPSD):
            matrix_sqrt_psd(np.diag([1.0, -0.1]))


class TestValidate:
    def test_ok(self):
        assert validate_density(np.eye(2) / 2, [2]).dims == (2,)

    def test_not_psd(self):
        with pytest.raises(NotPSD):
            validate_density(np.diag([1.2, -0.2]), [2])

    def test_clamp_boundary(self):
        rho = validate_density(np.diag([0.5 + 1e-10, 0.5 - 1e-10, 0, 0]), [2, 2])
        assert abs(np.trace(rho.mat) - 1) < 1e-12

    def test_small_negative_clamped(self):
        rho = validate_density(np.diag([0.5 + 5e-10, 0.5, -5e-10, 0]), [2, 2])
        assert np.min(eigvals_hermitian(rho.mat)) >= -1e-15

    def test_trace(self):
        with pytest.raises(TraceMismatch):
            validate_density(np.eye(2), [2])

    def test_hermitian(self):
        with pytest.raises(NotHermitian):
            validate_density(np.array([[0.5, 0.1], [0.0, 0.5]]), [2])

    def test_dims(self):
        with pytest.raises(DimensionMismatch):
            validate_density(np.eye(4) / 4, [3])

    def test_predicate(self):
        assert is_valid_density(ket_density(PHI_PLUS))
        assert not is_valid_density(DensityMatrix(np.diag([1.2, -0.2]), (2,)))

    def test_density_is_read_only(self):
        rho = ket_density(HH)
        with pytest.raises(ValueError):
            rho.mat[0, 0] = 2

    def test_purity(self):
        assert math.isclose(bell_diagonal_state(0.3, 20.0).purity(), 0.58, abs_tol=1e-12)
