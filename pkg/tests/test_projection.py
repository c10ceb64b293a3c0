"""Tests for bath states, Bloch rotations and the projected blocks."""

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from src.errors import InvalidInputError
from src.hilbert import ManyBodyOperator
from src.hilbert.two_site import coupling_block, excited_block, static_block
from src.projection import (
    BathState,
    BlochRotation,
    bloch_unitary,
    canonical_bath_state,
    complete_bath_basis,
    partner_bath_state,
    project,
    projector_family,
    reassemble,
    rotate_bath_state,
    rotated_hamiltonian,
    rotation_coefficients,
    with_epsilon,
)

angles = st.floats(min_value=0, max_value=2 * math.pi, allow_nan=False)
polar = st.floats(min_value=0, max_value=math.pi, allow_nan=False)
components = st.floats(min_value=-1, max_value=1, allow_nan=False)


class TestBathState:
    """Tests for bath-state validation."""

    def test_rejects_unnormalized(self):
        """Test that an unnormalized vector is rejected."""
        with pytest.raises(InvalidInputError, match="normalized"):
            BathState(np.array([1.0, 1.0]))

    def test_normalized_constructor(self):
        """Test normalizing arbitrary amplitudes."""
        bath = BathState.normalized([3, 4j])
        np.testing.assert_allclose(bath.amplitudes, [0.6, 0.8j])

    def test_zero_vector(self):
        """Test that the zero vector cannot be normalized."""
        with pytest.raises(InvalidInputError):
            BathState.normalized([0, 0])

    def test_canonical(self):
        """Test canonical basis states."""
        np.testing.assert_allclose(canonical_bath_state(3, 2).amplitudes, [0, 0, 1])
        with pytest.raises(InvalidInputError):
            canonical_bath_state(2, 2)


class TestBlochRotation:
    """Tests for Bloch-sphere rotations."""

    def test_rejects_non_unit_axis(self):
        """Test that the axis must be a unit vector."""
        with pytest.raises(InvalidInputError, match="unit norm"):
            BlochRotation((1.0, 1.0, 0.0), 0.3)

    @given(polar, angles, angles)
    def test_unitary(self, theta, azimuth, phi):
        """Test that every rotation is unitary."""
        U = bloch_unitary(BlochRotation.from_spherical(theta, azimuth, phi))
        np.testing.assert_allclose(U.conj().T @ U, np.eye(2), atol=1e-12)

    @given(polar, angles, angles)
    def test_closed_form_coefficients(self, theta, azimuth, phi):
        """Test the closed-form amplitudes of U|0⟩."""
        rot = BlochRotation.from_spherical(theta, azimuth, phi)
        np.testing.assert_allclose(
            rotation_coefficients(rot), bloch_unitary(rot)[:, 0], atol=1e-12
        )

    def test_full_turn_is_minus_identity(self):
        """Test U(2π) = -I."""
        rot = BlochRotation((0.0, 0.0, 1.0), 2 * math.pi)
        np.testing.assert_allclose(bloch_unitary(rot), -np.eye(2), atol=1e-12)

    def test_half_turn_about_x_flips(self):
        """Test that a π rotation about x maps |0⟩ to -i|x⟩."""
        bath = rotate_bath_state(canonical_bath_state(2), BlochRotation((1.0, 0.0, 0.0), math.pi))
        np.testing.assert_allclose(bath.amplitudes, [0, -1j], atol=1e-12)
        assert bath.provenance == ((1.0, 0.0, 0.0), math.pi)

    @given(polar, angles, angles)
    def test_partner_orthogonal(self, theta, azimuth, phi):
        """Test that the rotated partner level stays orthogonal."""
        rot = BlochRotation.from_spherical(theta, azimuth, phi)
        first = rotate_bath_state(canonical_bath_state(2), rot)
        second = partner_bath_state(rot)
        assert abs(np.vdot(first.amplitudes, second.amplitudes)) < 1e-12

    def test_pair_on_larger_bath(self):
        """Test that levels outside the pair are untouched."""
        base = BathState.normalized([1, 0, 1])
        rotated = rotate_bath_state(base, BlochRotation((0.0, 1.0, 0.0), 1.0), pair=(0, 1))
        assert rotated.amplitudes[2] == pytest.approx(1 / math.sqrt(2))

    def test_invalid_pair(self):
        """Test rotation pair validation."""
        with pytest.raises(InvalidInputError):
            rotate_bath_state(canonical_bath_state(2), BlochRotation((1.0, 0, 0), 1.0), (0, 0))


class TestBathBasis:
    """Tests for completing a bath state to a unitary."""

    @given(st.lists(components, min_size=6, max_size=6))
    def test_complete_basis_unitary(self, values):
        """Test that the completed basis is unitary with the bath state first."""
        amplitudes = np.array(values[:3]) + 1j * np.array(values[3:])
        if np.linalg.norm(amplitudes) < 1e-3:
            amplitudes = np.array([1.0, 0.0, 0.0])
        bath = BathState.normalized(amplitudes)
        Q = complete_bath_basis(bath)
        np.testing.assert_allclose(Q.conj().T @ Q, np.eye(3), atol=1e-12)
        np.testing.assert_allclose(Q[:, 0], bath.amplitudes, atol=1e-14)

    def test_projector_family_resolves_identity(self):
        """Test that the projectors of a complete bath basis sum to the identity."""
        bath = BathState.normalized([1, 1j, 0.5])
        projectors = projector_family(complete_bath_basis(bath), soi_dim=2)
        np.testing.assert_allclose(sum(projectors), np.eye(6), atol=1e-12)
        for P in projectors:
            np.testing.assert_allclose(P @ P, P, atol=1e-12)


class TestProject:
    """Tests for projecting a Hamiltonian onto a bath state."""

    def test_canonical_bath_blocks(self, demo_params, demo_H):
        """Test that the empty-bath projection returns the model blocks."""
        blocks = project(demo_H, canonical_bath_state(2, 0))
        np.testing.assert_allclose(blocks.H_S, static_block(demo_params))
        np.testing.assert_allclose(blocks.H_R, excited_block(demo_params))
        np.testing.assert_allclose(blocks.C, coupling_block(demo_params).conj().T)

    def test_rotated_frame_is_unitary_image(self, demo_H):
        """Test that the blocks reassemble into frame† H frame."""
        bath = rotate_bath_state(canonical_bath_state(2), BlochRotation((0.0, 1.0, 0.0), 0.7))
        blocks = project(demo_H, bath)
        np.testing.assert_allclose(
            rotated_hamiltonian(blocks),
            blocks.frame.conj().T @ demo_H.matrix @ blocks.frame,
            atol=1e-12,
        )
        np.testing.assert_allclose(blocks.universe.values, demo_H.eigenvalues, atol=1e-10)

    def test_epsilon_scales_coupling(self, generic_H):
        """Test reassembly at a reduced coupling."""
        blocks = project(generic_H, canonical_bath_state(2), epsilon=0.25)
        H = reassemble(blocks, 0.25)
        np.testing.assert_allclose(H.matrix[:2, 2:], 0.5 * blocks.C)
        assert with_epsilon(blocks, 0.5).epsilon == 0.5

    def test_zero_epsilon_decouples(self, generic_H):
        """Test that ε = 0 leaves the static spectrum inside the universe spectrum."""
        blocks = project(generic_H, canonical_bath_state(2), epsilon=0.0)
        for value in blocks.static.values:
            assert np.min(np.abs(blocks.universe.values - value)) < 1e-10

    def test_invalid_epsilon(self, generic_H):
        """Test that ε outside [0, 1] is rejected."""
        with pytest.raises(InvalidInputError):
            project(generic_H, canonical_bath_state(2), epsilon=1.5)

    def test_bath_dimension_mismatch(self, generic_H):
        """Test that the bath state must match the bath factor."""
        with pytest.raises(InvalidInputError):
            project(generic_H, canonical_bath_state(3))

    def test_to_original(self, random_hermitian):
        """Test mapping a rotated-frame eigenvector back to the original basis."""
        H = ManyBodyOperator.from_matrix(random_hermitian(6, seed=11), soi_dim=2, bath_dim=3)
        blocks = project(H, BathState.normalized([1, 2j, -1]))
        vector = blocks.to_original(blocks.universe.vector(0))
        np.testing.assert_allclose(
            H.matrix @ vector, blocks.universe.values[0] * vector, atol=1e-10
        )
