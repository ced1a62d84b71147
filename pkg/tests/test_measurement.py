import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import HH, PHI_PLUS, ket_density, random_density
from eurcoh.errors import DimensionMismatch
from eurcoh.infotheory import von_neumann_entropy
from eurcoh.measurement import dephase_global, measure_local, product_basis
from eurcoh.qla import DensityMatrix, eig_hermitian
from eurcoh.states import KETS, bell_diagonal_state, mub_qubit

X, Y, Z = mub_qubit()
seeds = st.integers(0, 2**32 - 1).map(np.random.default_rng)


def born_oracle(rho, ket_a):
    """p_i and rho_B|i from <a| rho_AB |a> contracted index by index."""
    m = rho.mat.reshape(2, 2, 2, 2)
    block = np.einsum("i,ijkl,k->jl", ket_a.conj(), m, ket_a)
    p = np.trace(block).real
    return p, block / p if p > 1e-12 else None


class TestMeasureLocal:
    def test_eigenstate(self):
        ens = measure_local(ket_density(HH), Z)
        assert np.allclose(ens.probabilities, [1, 0])
        assert np.allclose(ens.conditional_memory[0].mat, np.diag([1, 0]))
        assert ens.conditional_memory[1] is None

    def test_bell_x(self):
        ens = measure_local(ket_density(PHI_PLUS), X)
        assert np.allclose(ens.probabilities, [0.5, 0.5])
        for rb in ens.conditional_memory:
            assert math.isclose(rb.purity(), 1.0, abs_tol=1e-12)
        assert math.isclose(von_neumann_entropy(ens.dephased_joint), 1.0, abs_tol=1e-12)

    def test_equal_mixture_dephases_to_identity(self):
        ens = measure_local(bell_diagonal_state(0.5, 45.0), Z)
        assert np.allclose(ens.dephased_joint.mat, np.eye(4) / 4, atol=1e-14)

    @given(seeds, st.sampled_from([0, 1, 2]))
    def test_against_born_oracle(self, rng, mi):
        rho = random_density(rng)
        m = mub_qubit()[mi]
        ens = measure_local(rho, m)
        assert math.isclose(ens.probabilities.sum(), 1.0, abs_tol=1e-12)
        for ket, p, rb in zip(m.basis(), ens.probabilities, ens.conditional_memory):
            p_ref, rb_ref = born_oracle(rho, ket)
            assert math.isclose(p, p_ref, abs_tol=1e-12)
            assert np.allclose(rb.mat, rb_ref, atol=1e-12)

    @given(seeds, st.sampled_from([0, 1, 2]))
    def test_dephased_is_classical_quantum(self, rng, mi):
        rho = random_density(rng)
        m = mub_qubit()[mi]
        ens = measure_local(rho, m)
        expect = sum(p * np.kron(proj, rb.mat)
                     for p, proj, rb in zip(ens.probabilities, m.projectors, ens.conditional_memory))
        assert np.allclose(ens.dephased_joint.mat, expect, atol=1e-12)

    def test_dimension_checks(self):
        with pytest.raises(DimensionMismatch):
            measure_local(DensityMatrix(np.eye(2) / 2, (2,)), Z)
        with pytest.raises(DimensionMismatch):
            measure_local(DensityMatrix(np.eye(6) / 6, (3, 2)), Z)


class TestDephaseGlobal:
    def test_balanced(self):
        out = dephase_global(ket_density(KETS["D"], (2,)), Z.basis())
        assert np.allclose(out.mat, np.eye(2) / 2)

    def test_fixed_point(self, rng):
        rho = random_density(rng)
        spec = eig_hermitian(rho.mat)
        assert np.allclose(dephase_global(rho, list(spec.vectors.T)).mat, rho.mat, atol=1e-12)

    def test_bell_population(self):
        out = dephase_global(ket_density(PHI_PLUS), product_basis(Z.basis(), Z.basis()))
        assert np.allclose(out.mat, np.diag([0.5, 0, 0, 0.5]))

    def test_short_basis(self):
        with pytest.raises(DimensionMismatch):
            dephase_global(ket_density(PHI_PLUS), Z.basis())


def test_product_basis_order():
    vecs = product_basis(Z.basis(), Z.basis())
    assert np.allclose(np.array(vecs), np.eye(4))
