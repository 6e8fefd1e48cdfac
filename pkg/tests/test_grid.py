import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bpdlab.grid import (
    GridError,
    GridSpec,
    SampledFunction,
    forward_transform,
    from_callable,
    inverse_transform,
    lebesgue_norm,
    multiplier_apply,
    peak_average,
    peak_average_direct,
)
from bpdlab.fields import gaussian, random_band_limited


G1 = GridSpec(dim=1, n_points=256, length=40.0)


def rel_err(a, b):
    scale = max(np.max(np.abs(a)), np.max(np.abs(b)), 1e-300)
    return np.max(np.abs(np.asarray(a) - np.asarray(b))) / scale


class TestGridSpec:
    def test_lattice_symmetric_about_zero(self):
        xi = G1.xi_axis()
        assert 0.0 in xi
        assert xi[0] == -G1.xi_max
        assert xi[-1] == G1.xi_max - G1.dxi  # +N*dxi/2 excluded

    def test_dx_dxi_relation(self):
        assert abs(G1.dx * G1.dxi * G1.n_points - 2 * np.pi) < 1e-14

    @pytest.mark.parametrize("kwargs", [
        dict(dim=3, n_points=16, length=1.0),
        dict(dim=1, n_points=255, length=1.0),
        dict(dim=1, n_points=256, length=-1.0),
        dict(dim=2, n_points=128, length=1.0),  # exceeds 2-d cap
    ])
    def test_invalid_specs_rejected(self, kwargs):
        with pytest.raises(GridError):
            GridSpec(**kwargs)


class TestTransforms:
    def test_discrete_delta_has_flat_spectrum(self):
        vals = np.zeros(G1.shape, dtype=complex)
        vals[G1.n_points // 2] = 1.0 / G1.dx  # x = 0 sample
        f = SampledFunction(G1, "physical", vals)
        spec = forward_transform(f)
        assert rel_err(spec.values, np.ones(G1.shape)) < 1e-12

    def test_flat_spectrum_inverts_to_delta(self):
        spec = SampledFunction(G1, "frequency", np.ones(G1.shape, dtype=complex))
        f = inverse_transform(spec)
        expected = np.zeros(G1.shape, dtype=complex)
        expected[G1.n_points // 2] = 1.0 / G1.dx
        assert rel_err(f.values, expected) < 1e-12

    def test_gaussian_closed_form(self):
        # Continuum oracle: F[e^{-x^2/2}](xi) = sqrt(2 pi) e^{-xi^2/2}.
        f = gaussian(G1, width=1.0)
        spec = forward_transform(f)
        xi = G1.xi_axis()
        oracle = np.sqrt(2 * np.pi) * np.exp(-(xi ** 2) / 2.0)
        assert rel_err(spec.values, oracle) < 1e-10

    def test_gaussian_inverse_closed_form(self):
        xi = G1.xi_axis()
        spec = SampledFunction(G1, "frequency", np.sqrt(2 * np.pi) * np.exp(-(xi ** 2) / 2.0))
        f = inverse_transform(spec)
        x = G1.x_axis()
        assert rel_err(f.values, np.exp(-(x ** 2) / 2.0)) < 1e-10

    def test_linearity_exact(self):
        f1 = random_band_limited(G1, seed=1, normalize=None)
        f2 = random_band_limited(G1, seed=2, normalize=None)
        a, b = 2.5 - 1j, -0.75 + 0.5j
        lhs = forward_transform(
            SampledFunction(G1, "physical", a * f1.values + b * f2.values)
        ).values
        rhs = a * forward_transform(f1).values + b * forward_transform(f2).values
        assert rel_err(lhs, rhs) < 1e-13

    @pytest.mark.parametrize("seed", range(100))
    def test_parseval_and_roundtrip(self, seed):
        f = random_band_limited(G1, seed=seed, normalize=None)
        spec = forward_transform(f)
        lhs = G1.cell_volume * np.sum(np.abs(f.values) ** 2)
        rhs = (G1.dxi / (2 * np.pi)) * np.sum(np.abs(spec.values) ** 2)
        assert abs(lhs - rhs) / lhs < 1e-12
        back = inverse_transform(spec)
        assert rel_err(back.values, f.values) < 1e-12

    def test_roundtrip_2d(self):
        g2 = GridSpec(dim=2, n_points=32, length=12.0)
        f = random_band_limited(g2, seed=7, normalize=None)
        assert f.values.size == g2.n_points ** 2
        back = inverse_transform(forward_transform(f))
        assert rel_err(back.values, f.values) < 1e-12

    def test_representation_mismatch_raises(self):
        f = gaussian(G1)
        with pytest.raises(GridError):
            inverse_transform(f)
        with pytest.raises(GridError):
            forward_transform(forward_transform(f))


class TestMultiplier:
    def test_identity_multiplier(self):
        f = random_band_limited(G1, seed=3, normalize=None)
        out = multiplier_apply(np.ones(G1.shape), f)
        assert rel_err(out.values, f.values) < 1e-13

    def test_derivative_of_sine(self):
        # m(xi) = i xi realizes d/dx; oracle is the analytic derivative.
        x = G1.x_axis()
        w = 2 * np.pi / G1.length
        f = SampledFunction(G1, "physical", np.sin(w * x).astype(complex))
        out = multiplier_apply(1j * G1.xi_axis(), f)
        assert rel_err(out.values, w * np.cos(w * x)) < 1e-10

    def test_composition_matches_product(self):
        f = random_band_limited(G1, seed=4, normalize=None)
        m1 = np.exp(-np.abs(G1.xi_axis()))
        m2 = 1.0 / (1.0 + G1.xi_axis() ** 2)
        lhs = multiplier_apply(m1, multiplier_apply(m2, f))
        rhs = multiplier_apply(m1 * m2, f)
        assert rel_err(lhs.values, rhs.values) < 1e-12

    def test_projection_idempotent(self):
        f = random_band_limited(G1, seed=5, normalize=None)
        proj = (np.abs(G1.xi_axis()) <= 3.0).astype(float)
        once = multiplier_apply(proj, f)
        twice = multiplier_apply(proj, once)
        assert rel_err(once.values, twice.values) < 1e-12

    def test_lattice_mismatch_raises(self):
        f = gaussian(G1)
        with pytest.raises(GridError):
            multiplier_apply(np.ones(17), f)


class TestPeakAverage:
    def test_constant_input_gives_constant(self):
        f = SampledFunction(G1, "physical", np.ones(G1.shape, dtype=complex))
        out = peak_average(f, a=2.0)
        v = np.real(out.values)
        assert np.max(v) - np.min(v) < 1e-12 * np.max(v)

    def test_nonnegative_output(self):
        f = random_band_limited(G1, seed=11)
        out = peak_average(f, a=4.0)
        assert np.all(np.real(out.values) >= 0)
        assert np.max(np.abs(np.imag(out.values))) == 0

    def test_monotone_in_absolute_value(self):
        f = random_band_limited(G1, seed=12)
        bigger = SampledFunction(G1, "physical", np.abs(f.values) + 0.3)
        sf = peak_average(f, a=4.0)
        sg = peak_average(bigger, a=4.0)
        assert np.all(np.real(sg.values) - np.real(sf.values) >= -1e-13)

    @pytest.mark.parametrize("a", [0.5, 4.0])
    def test_matches_double_sum_oracle(self, a):
        f = random_band_limited(G1, seed=13)
        fast = peak_average(f, a)
        slow = peak_average_direct(f, a)
        assert rel_err(fast.values, slow.values) < 1e-12

    def test_matches_oracle_2d(self):
        g2 = GridSpec(dim=2, n_points=16, length=8.0)
        f = random_band_limited(g2, seed=14)
        assert rel_err(peak_average(f, 3.0).values, peak_average_direct(f, 3.0).values) < 1e-12

    def test_nonpositive_scale_rejected(self):
        with pytest.raises(GridError):
            peak_average(gaussian(G1), a=0.0)


class TestLebesgueNorm:
    def test_indicator_half_domain(self):
        vals = (G1.x_axis() < 0).astype(complex)
        f = SampledFunction(G1, "physical", vals)
        assert abs(lebesgue_norm(f, 1) - G1.length / 2) < 1e-12

    def test_sup_norm_is_max(self):
        f = random_band_limited(G1, seed=20, normalize=None)
        assert lebesgue_norm(f, np.inf) == np.max(np.abs(f.values))

    def test_gaussian_l2_closed_form(self):
        # ||e^{-x^2/2}||_2 = pi^{1/4}
        assert abs(lebesgue_norm(gaussian(G1), 2) - np.pi ** 0.25) < 1e-6

    @given(st.floats(min_value=-5, max_value=5), st.sampled_from([0.5, 1.0, 2.0, np.inf]))
    @settings(max_examples=25, deadline=None)
    def test_homogeneity(self, c, p):
        f = random_band_limited(G1, seed=21, normalize=None)
        scaled = SampledFunction(G1, "physical", c * f.values)
        assert abs(lebesgue_norm(scaled, p) - abs(c) * lebesgue_norm(f, p)) <= 1e-9 * (
            1 + lebesgue_norm(f, p)
        )

    def test_invalid_exponent(self):
        with pytest.raises(GridError):
            lebesgue_norm(gaussian(G1), -1.0)


def test_from_callable_matches_mesh():
    f = from_callable(G1, lambda pts: np.exp(-np.sum(pts ** 2, axis=-1)))
    assert rel_err(f.values, np.exp(-G1.x_axis() ** 2)) == 0
