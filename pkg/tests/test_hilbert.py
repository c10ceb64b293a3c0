"""Tests for bipartite bases, operators and the two-site model."""

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from src.errors import InvalidInputError
from src.hilbert import (
    BipartiteBasis,
    ManyBodyOperator,
    TwoSiteParams,
    build_two_site,
    diagonalize,
    energy_scale,
    pauli,
    pauli_vector,
)

reals = st.floats(min_value=-3, max_value=3, allow_nan=False)

ANTISYMMETRIC = np.array([0, 1, -1, 0]) / math.sqrt(2)


class TestBipartiteBasis:
    """Tests for the product basis."""

    def test_bath_index_varies_slower(self):
        """Test the flat index convention."""
        basis = BipartiteBasis(soi_dim=2, bath_dim=3)
        assert basis.dimension == 6
        assert basis.index(1, 0) == 1
        assert basis.index(0, 1) == 2
        assert basis.labels[3] == (1, 1)

    def test_as_matrix(self):
        """Test reshaping a flat state into bath rows."""
        basis = BipartiteBasis(2, 2)
        W = basis.as_matrix(np.arange(4))
        assert W.shape == (2, 2)
        assert W[1, 0] == 2

    def test_invalid_dimensions(self):
        """Test that non-positive dimensions are rejected."""
        with pytest.raises(InvalidInputError):
            BipartiteBasis(0, 2)
        with pytest.raises(InvalidInputError):
            BipartiteBasis(2, 2).index(2, 0)


class TestManyBodyOperator:
    """Tests for the Hermitian operator wrapper."""

    def test_rejects_non_hermitian(self):
        """Test that a non-Hermitian matrix is rejected."""
        with pytest.raises(InvalidInputError, match="Hermitian"):
            ManyBodyOperator(BipartiteBasis(1, 2), np.array([[0, 1], [0, 0]]))

    def test_rejects_shape_mismatch(self):
        """Test that the matrix must match the basis."""
        with pytest.raises(InvalidInputError):
            ManyBodyOperator(BipartiteBasis(2, 2), np.eye(3))

    def test_from_matrix_defaults(self):
        """Test that a raw matrix gets a one-dimensional SOI."""
        op = ManyBodyOperator.from_matrix(np.eye(3))
        assert (op.basis.soi_dim, op.basis.bath_dim) == (1, 3)

    def test_matrix_is_read_only(self, demo_H):
        """Test that the stored matrix cannot be modified."""
        with pytest.raises(ValueError):
            demo_H.matrix[0, 0] = 1.0

    def test_energy_scale_flat_spectrum(self):
        """Test the fallback scale for a flat spectrum."""
        assert energy_scale(np.array([2.0, 2.0])) == 2.0
        assert energy_scale(np.array([0.0])) == 1.0


class TestTwoSiteModel:
    """Tests for the two-site Hamiltonian."""

    def test_static_corner(self, demo_H):
        """Test the |0↑0↓⟩ diagonal element V00 - 3ω0/2."""
        assert demo_H.matrix[0, 0] == pytest.approx(-7.5)

    def test_demo_spectrum(self, demo_H):
        """Test the closed-form eigenvalues of the demonstration parameters."""
        root = math.sqrt(39.25)
        expected = [-2 - root, -2, -2, -2 + root]
        np.testing.assert_allclose(demo_H.eigenvalues, expected, atol=1e-10)

    def test_negated(self, demo_params):
        """Test that negated parameters give -H."""
        H = build_two_site(demo_params)
        H_neg = build_two_site(demo_params.negated())
        np.testing.assert_allclose(H_neg.matrix, -H.matrix)

    def test_invalid_parameter(self):
        """Test that non-finite parameters are rejected."""
        with pytest.raises(InvalidInputError):
            TwoSiteParams(omega0=float("nan"), omega_d=1, V00=0, V0x=0, Vxx=0, J0x=0)

    def test_to_dict(self, demo_params):
        """Test serialization of the complex dipole."""
        assert demo_params.to_dict()["omega_d"] == [2.0, 2.0]

    @given(reals, reals, reals, reals, reals, reals, reals)
    def test_antisymmetric_eigenstate(self, w0, wr, wi, v00, v0x, vxx, j):
        """Test that the SOI/bath antisymmetric state is always an eigenvector."""
        params = TwoSiteParams(w0, complex(wr, wi), v00, v0x, vxx, j)
        H = build_two_site(params)
        np.testing.assert_allclose(
            H.matrix @ ANTISYMMETRIC, (v0x - w0 / 2) * ANTISYMMETRIC, atol=1e-12
        )


class TestDiagonalize:
    """Tests for exact diagonalization."""

    def test_flags_degeneracy(self, demo_H, generic_H):
        """Test the degeneracy flag."""
        assert diagonalize(demo_H).degenerate is True
        assert diagonalize(generic_H).degenerate is False

    def test_degenerate_pair_resolved_by_exchange(self, demo_H):
        """Test that the degenerate pair splits into exchange-odd and exchange-even states."""
        eigen = diagonalize(demo_H)
        assert abs(np.vdot(ANTISYMMETRIC, eigen.vector(1))) == pytest.approx(1.0, abs=1e-10)
        assert abs(np.vdot(ANTISYMMETRIC, eigen.vector(2))) == pytest.approx(0.0, abs=1e-10)

    def test_repeatable(self, demo_H):
        """Test that repeated calls return the same eigenvectors up to phase."""
        first, second = diagonalize(demo_H), diagonalize(demo_H)
        overlaps = np.abs(np.einsum("ik,ik->k", first.vectors.conj(), second.vectors))
        np.testing.assert_allclose(overlaps, 1.0, atol=1e-10)

    def test_raw_matrix(self, random_hermitian):
        """Test diagonalizing a raw Hermitian matrix."""
        A = random_hermitian(5, seed=3)
        eigen = diagonalize(A)
        np.testing.assert_allclose(A @ eigen.vectors, eigen.vectors * eigen.values, atol=1e-10)
        assert len(eigen) == 5

    def test_vector_index_checked(self, generic_H):
        """Test that an out-of-range eigenstate index is rejected."""
        with pytest.raises(InvalidInputError):
            diagonalize(generic_H).vector(4)


class TestPauli:
    """Tests for the Pauli matrices."""

    def test_algebra(self):
        """Test σ¹σ² = iσ³."""
        np.testing.assert_allclose(pauli(1) @ pauli(2), 1j * pauli(3))

    def test_vector_shape(self):
        """Test the stacked Pauli vector."""
        assert pauli_vector().shape == (3, 2, 2)

    def test_invalid_axis(self):
        """Test that unknown axes are rejected."""
        with pytest.raises(InvalidInputError):
            pauli(0)
