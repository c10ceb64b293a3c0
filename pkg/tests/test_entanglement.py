"""Tests for reduced densities, entropies and the separability bound."""

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from src.entanglement import (
    ReducedDensity,
    entropy_bound,
    leak_entropy,
    optimal_bath_state,
    reduce,
    reduce_bath,
    reduce_state,
    schmidt_bound,
    two_state_density,
    von_neumann,
)
from src.errors import InvalidInputError
from src.hilbert import BipartiteBasis, TwoSiteParams, build_two_site, diagonalize
from src.projection import BlochRotation, canonical_bath_state, rotate_bath_state
from src.renorm import separability_direct, separability_from_eigensystem

probabilities = st.floats(min_value=0, max_value=1, allow_nan=False)
angles = st.floats(min_value=0, max_value=2 * math.pi, allow_nan=False)
polar = st.floats(min_value=0, max_value=math.pi, allow_nan=False)

DEMO_H = build_two_site(TwoSiteParams(6, 2 + 2j, 1.5, 1, 0.5, 1))


class TestReducedDensity:
    """Tests for partial traces."""

    def test_product_state_is_pure(self):
        """Test that a product state has zero entropy."""
        vector = np.kron([0.6, 0.8], [1, 0])
        rho = reduce_state(BipartiteBasis(2, 2), vector)
        assert von_neumann(rho) == pytest.approx(0.0, abs=1e-12)

    def test_singlet_is_maximally_mixed(self):
        """Test that the exchange-odd state carries ln 2."""
        vector = np.array([0, 1, -1, 0]) / math.sqrt(2)
        rho = reduce_state(BipartiteBasis(2, 2), vector)
        np.testing.assert_allclose(rho.matrix, np.eye(2) / 2, atol=1e-15)
        assert von_neumann(rho) == pytest.approx(math.log(2))

    def test_reduce_state_normalizes(self):
        """Test that an unnormalized state is normalized first."""
        rho = reduce_state(BipartiteBasis(2, 2), np.array([2.0, 0, 0, 0]))
        assert np.trace(rho.matrix).real == pytest.approx(1.0)

    def test_rejects_bad_trace(self):
        """Test that the trace must be one."""
        with pytest.raises(InvalidInputError, match="trace"):
            ReducedDensity(np.eye(2))

    def test_both_factors_share_spectrum(self, generic_H):
        """Test that the SOI and bath densities have the same spectrum."""
        eigen = diagonalize(generic_H)
        for index in range(4):
            np.testing.assert_allclose(
                reduce(generic_H, index, eigen).eigenvalues,
                reduce_bath(generic_H, index, eigen).eigenvalues,
                atol=1e-12,
            )


class TestEntropyBound:
    """Tests for the binary-entropy bound B(Z)."""

    def test_known_values(self):
        """Test the endpoints and the midpoint."""
        assert entropy_bound(0.0) == 0.0
        assert entropy_bound(1.0) == 0.0
        assert entropy_bound(0.5) == pytest.approx(math.log(2))

    @given(probabilities)
    def test_symmetric(self, Z):
        """Test B(Z) = B(1 - Z)."""
        assert entropy_bound(Z) == pytest.approx(entropy_bound(1 - Z), abs=1e-12)

    @given(probabilities)
    def test_two_state_density(self, Z):
        """Test that diag(Z, 1 - Z) has entropy B(Z)."""
        assert von_neumann(two_state_density(Z)) == pytest.approx(entropy_bound(Z), abs=1e-12)

    @given(probabilities, probabilities)
    def test_leak_never_lowers_entropy(self, Z, fraction):
        """Test that spreading weight onto a third level cannot lower the entropy."""
        leak = fraction * (1 - Z)
        assert leak_entropy(Z, leak) >= entropy_bound(Z) - 1e-12

    def test_out_of_range(self):
        """Test that Z outside [0, 1] is rejected."""
        with pytest.raises(InvalidInputError):
            entropy_bound(1.5)

    @given(polar, angles, angles, st.integers(min_value=0, max_value=3))
    def test_entropy_between_bounds(self, theta, azimuth, phi, index):
        """Test B(Z_max) <= E <= B(Z) for every rotated bath state."""
        H = DEMO_H
        eigen = diagonalize(H)
        bath = rotate_bath_state(
            canonical_bath_state(2), BlochRotation.from_spherical(theta, azimuth, phi)
        )
        Z = separability_direct(H, bath, index, eigen)
        E = von_neumann(reduce(H, index, eigen))
        assert E <= entropy_bound(min(max(Z, 0.0), 1.0)) + 1e-12
        assert E >= entropy_bound(schmidt_bound(H, index, eigen)) - 1e-12

    def test_dense_bath_sample(self, demo_H):
        """Test the lower bound over a dense set of bath rotations."""
        eigen = diagonalize(demo_H)
        entropies = np.array([von_neumann(reduce(demo_H, n, eigen)) for n in range(4)])
        rng = np.random.default_rng(0)
        violations = 0
        samples = rng.uniform([0, 0, 0], [math.pi, 2 * math.pi, 2 * math.pi], size=(10_000, 3))
        for theta, azimuth, phi in samples:
            bath = rotate_bath_state(
                canonical_bath_state(2), BlochRotation.from_spherical(theta, azimuth, phi)
            )
            Z = np.clip(separability_from_eigensystem(demo_H, eigen, bath), 0.0, 1.0)
            bounds = np.array([entropy_bound(z) for z in Z])
            violations += int(np.sum(entropies > bounds + 1e-12))
        assert violations == 0


class TestSchmidtBound:
    """Tests for the supremum of Z over bath states."""

    def test_optimal_state_attains_bound(self, generic_H):
        """Test that the optimal bath state reaches the Schmidt bound."""
        eigen = diagonalize(generic_H)
        for index in range(4):
            bath = optimal_bath_state(generic_H, index, eigen)
            assert separability_direct(generic_H, bath, index, eigen) == pytest.approx(
                schmidt_bound(generic_H, index, eigen), abs=1e-12
            )

    def test_demo_values(self, demo_H):
        """Test the demonstration states: two nearly separable, two entangled."""
        eigen = diagonalize(demo_H)
        bounds = [schmidt_bound(demo_H, n, eigen) for n in range(4)]
        assert bounds[0] >= 0.99
        assert bounds[3] >= 0.99
        assert bounds[1] == pytest.approx(0.5, abs=1e-10)
        assert 0.5 < bounds[2] < 0.999
