"""Tests for the weak-coupling expansions, the Lorentzian and the impurity model."""

import math

import numpy as np
import pytest

from src.errors import DegenerateKernelError, InvalidInputError
from src.hilbert import ManyBodyOperator
from src.projection import canonical_bath_state, project
from src.renorm import find_fixed_points, kernel_build, trace_curves
from src.weakcoupling import (
    LorentzianModel,
    WidthConvention,
    compare_to_lorentzian,
    effective_two_level,
    first_order_eigenvalue,
    greens_frame,
    greens_frequency,
    greens_time,
    greens_time_numeric,
    hybridization,
    lippmann_schwinger_state,
    lorentzian_integral,
    lorentzian_weight,
    rescaled_weights,
    scaling_errors,
    scaling_exponent,
    siam_build,
    siam_for_width,
    siam_report,
    siam_spectral_weights,
    slope_rpa,
    spectral_function,
)


class TestPerturbation:
    """Tests for first-order eigenpairs and the RPA slope."""

    def test_zero_coupling(self, generic_H):
        """Test that ε = 0 returns the static eigenvalue."""
        blocks = project(generic_H, canonical_bath_state(2))
        value = first_order_eigenvalue(blocks, 0, epsilon=0.0)
        assert value == blocks.static.values[0]

    def test_state_is_normalized(self, generic_H):
        """Test the first-order state."""
        blocks = project(generic_H, canonical_bath_state(2), epsilon=0.01)
        state = lippmann_schwinger_state(blocks, 1)
        assert np.linalg.norm(state) == pytest.approx(1.0)
        assert abs(np.vdot(blocks.static.vector(1), state)) > 0.99

    def test_quadratic_scaling(self, generic_H):
        """Test that every weak-coupling error scales as ε²."""
        blocks = project(generic_H, canonical_bath_state(2))
        errors = scaling_errors(blocks, 0)
        for key in ("similarity_loss", "eigenvalue", "state"):
            assert scaling_exponent(errors["epsilon"], errors[key]) == pytest.approx(2.0, abs=0.2)

    def test_rpa_slope_small_coupling(self, generic_H):
        """Test that the RPA slope tracks the exact slope at weak coupling."""
        blocks = project(generic_H, canonical_bath_state(2), epsilon=1e-3)
        kernel = kernel_build(blocks)
        omega_s = float(blocks.static.values[0])
        records = find_fixed_points(trace_curves(blocks, omega_s - 0.5, omega_s + 0.5, 16), blocks)
        record = records[0]
        rpa = slope_rpa(blocks, kernel, 0, record.omega_lambda)
        assert rpa > 0
        assert rpa == pytest.approx(-record.slope, rel=0.5)

    @pytest.mark.parametrize("seed", range(3))
    def test_rpa_exact_for_scalar_soi(self, random_hermitian, seed):
        """Test that one SOI level against one rest level makes the RPA slope exact."""
        H = ManyBodyOperator.from_matrix(random_hermitian(2, seed), soi_dim=1, bath_dim=2)
        blocks = project(H, canonical_bath_state(2))
        kernel = kernel_build(blocks)
        values = blocks.universe.values
        curves = trace_curves(blocks, float(values[0]) - 1.0, float(values[-1]) + 1.0, 200)
        records = find_fixed_points(curves, blocks)
        assert len(records) == 2
        for record in records:
            rpa = slope_rpa(blocks, kernel, 0, record.omega_lambda)
            assert rpa == pytest.approx(-record.slope, rel=1e-10)

    def test_rpa_needs_kernel(self, generic_H):
        """Test that a non-zero coupling requires a kernel."""
        blocks = project(generic_H, canonical_bath_state(2))
        with pytest.raises(DegenerateKernelError):
            slope_rpa(blocks, None, 0, 0.0)

    def test_scaling_exponent_validation(self):
        """Test the log-log fit input checks."""
        assert scaling_exponent([1, 10], [1, 100]) == pytest.approx(2.0)
        with pytest.raises(InvalidInputError):
            scaling_exponent([1], [1])


class TestLorentzian:
    """Tests for the Lorentzian weight factor."""

    def test_peak_and_half_width(self):
        """Test the peak value and the half maximum."""
        model = LorentzianModel(omega_S=1.0, half_width=0.2)
        assert lorentzian_weight(model, 1.0) == pytest.approx(model.peak)
        assert lorentzian_weight(model, 1.2) == pytest.approx(model.peak / 2)

    def test_integral_below_one(self):
        """Test that the mass inside the cutoff is one minus the tails."""
        model = LorentzianModel(omega_S=0.0, half_width=0.1)
        expected = 2 / math.pi * math.atan(model.cutoff / model.half_width)
        assert lorentzian_integral(model) == pytest.approx(expected, rel=1e-8)
        assert lorentzian_integral(model) < 1

    def test_cutoff_validation(self):
        """Test that the cutoff must exceed the half-width."""
        with pytest.raises(InvalidInputError):
            LorentzianModel(omega_S=0.0, half_width=1.0, cutoff=0.5)
        model = LorentzianModel(omega_S=0.0, half_width=1.0)
        with pytest.raises(InvalidInputError):
            lorentzian_weight(model, 100.0)

    def test_matches_impurity_spectral_function(self):
        """Test that the weight factor and the impurity spectral function coincide."""
        model = LorentzianModel(omega_S=0.3, half_width=0.25)
        omega = np.linspace(-1.5, 2.0, 41)
        np.testing.assert_allclose(
            lorentzian_weight(model, omega),
            spectral_function(omega, 0.3, 0.25),
            rtol=1e-12,
        )

    def test_from_kernel_and_rescaling(self, generic_H):
        """Test the kernel half-width and the rescaled weights."""
        blocks = project(generic_H, canonical_bath_state(2), epsilon=0.04)
        kernel = kernel_build(blocks)
        model = LorentzianModel.from_kernel(blocks, kernel, 0)
        K_SS = float(kernel.K_in_static_basis[0, 0].real)
        assert model.half_width == pytest.approx(math.sqrt(0.04 * K_SS))

        values = blocks.universe.values
        records = find_fixed_points(
            trace_curves(blocks, values[0] - 1, values[-1] + 1, 400), blocks, static_index=0
        )
        rescaled = rescaled_weights(records, model)
        assert all(w >= 0 for _, w in rescaled)
        assert len(rescaled) <= len(records)


class TestSIAM:
    """Tests for the discretized impurity model."""

    def test_build(self):
        """Test the flat band and the analytic record."""
        model = siam_build(0.0, bandwidth=10.0, modes=50, t0=0.3)
        assert model.modes == 50
        assert model.bath_energies[0] == pytest.approx(-5.0)
        assert model.analytic.delta0 == pytest.approx(0.09)
        assert model.half_width == pytest.approx(math.pi * 0.09)

    def test_for_width(self):
        """Test choosing the coupling for a target half-width."""
        model = siam_for_width(0.0, 0.5, 20.0, 100)
        assert model.half_width == pytest.approx(0.5)
        bare = siam_for_width(0.0, 0.5, 20.0, 100, WidthConvention.BARE)
        assert bare.half_width == pytest.approx(0.5)
        assert bare.analytic.delta0 == pytest.approx(0.5)

    def test_weights_are_a_distribution(self):
        """Test that the impurity weights are non-negative and sum to one."""
        weights = siam_spectral_weights(siam_for_width(0.0, 0.5, 20.0, 200))
        assert (weights["weight"] >= 0).all()
        assert weights["weight"].sum() == pytest.approx(1.0, abs=1e-10)
        assert weights["omega"].is_monotonic_increasing

    def test_hybridization_imaginary_part(self):
        """Test that -Im Δ(ω + iη) approaches the half-width inside the band."""
        model = siam_for_width(0.0, 0.5, 20.0, 2000)
        spacing = 20.0 / 2000
        value = hybridization(model, complex(0.0, 5 * spacing))
        assert -value.imag == pytest.approx(0.5, rel=0.05)

    def test_converges_to_lorentzian(self):
        """Test that the pointwise relative error on |ω| ≤ 3Γ shrinks with the level count."""
        errors = []
        for modes in (100, 500, 2000):
            comparison = compare_to_lorentzian(siam_for_width(0.0, 0.5, 20.0, modes))
            errors.append(comparison.max_error)
        assert errors[0] > errors[1] > errors[2]
        assert errors[2] < 0.05
        assert comparison.peak_error <= comparison.max_error
        assert comparison.fit_half_width == pytest.approx(0.5, rel=0.05)

    def test_edge_compensation_cancels_real_part(self):
        """Test that the edge levels remove the band's real shift and keep its width."""
        plain = siam_for_width(0.0, 0.5, 20.0, 2000, edge_compensation=False)
        compensated = siam_for_width(0.0, 0.5, 20.0, 2000)
        eta = 5 * 20.0 / 2000
        shifted = hybridization(plain, complex(1.5, eta))
        assert shifted.real == pytest.approx(0.5 / math.pi * math.log(11.5 / 8.5), rel=0.02)
        assert abs(hybridization(compensated, complex(1.5, eta)).real) < 5e-3
        assert hybridization(compensated, complex(0.0, eta)).imag == pytest.approx(
            hybridization(plain, complex(0.0, eta)).imag, rel=1e-2
        )
        assert compensated.analytic == plain.analytic

    def test_band_edge_error_floor(self):
        """Test that without compensation the finite band leaves a larger error."""
        plain = compare_to_lorentzian(siam_for_width(0.0, 0.5, 20.0, 2000, edge_compensation=False))
        compensated = compare_to_lorentzian(siam_for_width(0.0, 0.5, 20.0, 2000))
        assert plain.max_error > 0.05
        assert compensated.max_error < plain.max_error

    def test_report(self):
        """Test the JSON-ready report."""
        model = siam_for_width(0.0, 0.5, 20.0, 200)
        report = siam_report(model, compare_to_lorentzian(model), 0.5)
        assert report["L"] == 200
        assert report["width_convention"] == "golden_rule_pi"
        assert len(report["weights"]) == 201
        assert set(report["lorentzian_fit"]) == {"center", "half_width"}
        assert report["edge_compensation"] is True
        assert report["peak_error"] <= report["max_error"]

    def test_invalid_modes(self):
        """Test that a single bath level is refused."""
        with pytest.raises(InvalidInputError):
            siam_build(0.0, 10.0, 1, 0.3)


class TestGreens:
    """Tests for the impurity Green's function and the two-level picture."""

    def test_decay(self):
        """Test |G(t)| = exp(-Δ0 t)."""
        t = np.linspace(0, 20, 51)
        np.testing.assert_allclose(np.abs(greens_time(1.0, 0.5, t)), np.exp(-0.5 * t))

    def test_numeric_transform(self):
        """Test the quadrature transform against the closed form on [0, 10/Δ0]."""
        t = np.linspace(0, 20, 41)
        numeric = greens_time_numeric(1.0, 0.5, t)
        assert np.max(np.abs(np.abs(numeric) - np.exp(-0.5 * t))) < 1e-6

    def test_no_width_is_pure_phase(self):
        """Test that Δ0 = 0 gives |G| = 1."""
        t = np.linspace(0, 5, 11)
        np.testing.assert_allclose(np.abs(greens_time(2.0, 0.0, t)), 1.0)

    def test_frequency_peak(self):
        """Test -Im G(ω)/π at the centre."""
        assert -greens_frequency(1.0, 1.0, 0.5).imag / math.pi == pytest.approx(
            spectral_function(1.0, 1.0, 0.5)
        )

    def test_two_level_eigenvalues(self):
        """Test the complex pair ω_S ∓ iΔ0."""
        _, values = effective_two_level(1.5, 0.4)
        np.testing.assert_allclose(values, [1.5 - 0.4j, 1.5 + 0.4j], atol=1e-12)

    def test_two_level_propagators(self):
        """Test the decaying mode against G(t) and the literal element against cosh."""
        model, _ = effective_two_level(1.0, 0.5)
        t = np.linspace(0, 4, 9)
        np.testing.assert_allclose(model.decaying_propagator(t), greens_time(1.0, 0.5, t), atol=1e-10)
        np.testing.assert_allclose(
            np.abs(model.literal_propagator(t)), np.cosh(0.5 * t), rtol=1e-10
        )

    def test_frame_columns(self):
        """Test the time-domain table."""
        frame = greens_frame(0.0, 0.5, np.linspace(0, 2, 5), numeric=False)
        assert list(frame.columns[:4]) == ["t", "re_G", "im_G", "abs_G"]
        assert "abs_G_numeric" not in frame

    def test_negative_width(self):
        """Test that a negative width is rejected."""
        with pytest.raises(InvalidInputError):
            greens_time(0.0, -1.0, [0.0])
