"""Model Hamiltonians: bitwise Ising, random-matrix ensembles, random states."""

import numpy as np
import pytest

from conftest import hermiticity_defect, ising_dense_oracle

from krylov_echo.linalg import basis_state
from krylov_echo.models import (
    IsingParams,
    goe_sample,
    gue_sample,
    ising_operator,
    random_state,
)


class TestIsingOperator:
    def test_classical_energies(self):
        # No fields: |00> has both spins up (zz energy -J), |01> one down (+J).
        ham = ising_operator(IsingParams(2, J=1.0, h_x=0.0, h_z=0.0))
        assert np.allclose(ham.apply(basis_state(4, 0)), -1.0 * basis_state(4, 0))
        assert np.allclose(ham.apply(basis_state(4, 1)), +1.0 * basis_state(4, 1))
        assert np.allclose(ham.apply(basis_state(4, 3)), -1.0 * basis_state(4, 3))

    def test_transverse_term_flips_bits(self):
        ham = ising_operator(IsingParams(2, J=0.0, h_x=0.7, h_z=0.0))
        out = ham.apply(basis_state(4, 0))
        expected = 0.7 * (basis_state(4, 1) + basis_state(4, 2))
        assert np.allclose(out, expected, atol=1e-15)

    def test_matches_kronecker_oracle(self, rng):
        params = IsingParams(4, J=0.8, h_x=1.1, h_z=0.4)
        ham = ising_operator(params)
        dense = ising_dense_oracle(params)
        assert np.abs(ham.to_dense() - dense).max() <= 1e-13

    def test_matrix_free_apply_matches_dense(self, rng):
        params = IsingParams(5, J=1.0, h_x=0.9, h_z=0.3)
        ham = ising_operator(params)
        dense = ising_dense_oracle(params)
        vec = rng.standard_normal(32) + 1j * rng.standard_normal(32)
        assert np.abs(ham.apply(vec) - dense @ vec).max() <= 1e-13

    def test_hermiticity_probe(self, rng):
        ham = ising_operator(IsingParams(6))
        assert hermiticity_defect(ham, rng) <= 1e-12

    def test_linearity(self, rng):
        ham = ising_operator(IsingParams(4))
        u = rng.standard_normal(16) + 1j * rng.standard_normal(16)
        v = rng.standard_normal(16) + 1j * rng.standard_normal(16)
        a, b = 1.3 - 0.2j, -0.7 + 2.1j
        lhs = ham.apply(a * u + b * v)
        rhs = a * ham.apply(u) + b * ham.apply(v)
        assert np.abs(lhs - rhs).max() <= 1e-12 * np.abs(lhs).max()

    def test_caps(self):
        with pytest.raises(ValueError, match=">= 2"):
            IsingParams(1)
        with pytest.raises(ValueError, match="cap"):
            ising_operator(IsingParams(21))


class TestEnsembles:
    def test_goe_deterministic(self):
        a = goe_sample(32, 7)
        b = goe_sample(32, 7)
        assert np.array_equal(a.matrix, b.matrix)

    def test_goe_exactly_symmetric(self):
        mat = goe_sample(64, 1).matrix
        assert np.array_equal(mat, mat.T)

    def test_goe_semicircle_support(self):
        # Off-diagonal variance 1/2 puts the spectral edge near sqrt(2 D).
        dim = 256
        evals = np.linalg.eigvalsh(goe_sample(dim, 11).matrix)
        edge = np.sqrt(2.0 * dim)
        assert np.abs(evals).max() <= 1.2 * edge
        assert np.abs(evals).max() >= 0.8 * edge

    def test_gue_deterministic(self):
        assert np.array_equal(gue_sample(32, 3).matrix, gue_sample(32, 3).matrix)

    def test_gue_exactly_hermitian(self):
        mat = gue_sample(64, 2).matrix
        assert np.array_equal(mat, mat.conj().T)

    def test_gue_semicircle_support(self):
        # Off-diagonal variance 1 puts the spectral edge near 2 sqrt(D).
        dim = 256
        evals = np.linalg.eigvalsh(gue_sample(dim, 12).matrix)
        edge = 2.0 * np.sqrt(dim)
        assert np.abs(evals).max() <= 1.2 * edge
        assert np.abs(evals).max() >= 0.8 * edge

    def test_dimension_caps(self):
        with pytest.raises(ValueError, match=">= 2"):
            goe_sample(1, 0)
        with pytest.raises(ValueError, match="cap"):
            gue_sample(5000, 0)


class TestRandomState:
    def test_normalized(self):
        assert abs(np.linalg.norm(random_state(512, 9)) - 1.0) <= 1e-14

    def test_deterministic(self):
        assert np.array_equal(random_state(64, 5), random_state(64, 5))

    def test_population_concentration(self):
        dim = 1024
        pops = np.abs(random_state(dim, 42)) ** 2
        assert pops.mean() == pytest.approx(1.0 / dim, abs=1e-18)
        assert pops.max() <= 15.0 / dim

    def test_dimension_check(self):
        with pytest.raises(ValueError, match=">= 1"):
            random_state(0, 1)
