"""Grid, profile, quadrature and hazard primitives."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import swp
from swp import (
    AgeProfile,
    GridError,
    ValidationError,
    build_grid,
    constant_profile,
    cumulative_attrition,
    integrate,
    interpolate_profile,
    normalize_distribution,
)


class TestBuildGrid:
    def test_standard_grid(self, grid50):
        assert grid50.n == 50
        assert grid50.nodes.shape == (51,)
        assert grid50.nodes[0] == 20.0
        assert grid50.nodes[-1] == 70.0

    def test_fine_grid_node_count(self):
        g = build_grid(20.0, 70.0, 0.5)
        assert g.n == 100

    def test_dz_must_divide_span(self):
        with pytest.raises(GridError):
            build_grid(20.0, 70.0, 0.7)

    def test_degenerate_span_rejected(self):
        with pytest.raises(GridError):
            build_grid(70.0, 20.0, 1.0)
        with pytest.raises(GridError):
            build_grid(20.0, 70.0, -1.0)


class TestCumulativeAttrition:
    def test_constant_hazard_closed_form(self, grid50):
        ca = cumulative_attrition(constant_profile(grid50, 0.1))
        assert ca.M[-1] == pytest.approx(5.0, abs=1e-12)
        assert ca.survival[-1] == pytest.approx(np.exp(-5.0), rel=1e-12)

    def test_hazard_30_percent(self):
        g = build_grid(20.0, 30.0, 1.0)
        ca = cumulative_attrition(constant_profile(g, 0.3))
        assert ca.M[-1] == pytest.approx(3.0, abs=1e-12)

    def test_zero_hazard(self, grid50):
        ca = cumulative_attrition(constant_profile(grid50, 0.0))
        assert np.all(ca.M == 0.0)
        assert np.all(ca.survival == 1.0)

    @given(
        lo=st.floats(0.0, 0.2),
        hi=st.floats(0.2, 0.5),
    )
    @settings(max_examples=30, deadline=None)
    def test_monotone_in_hazard(self, lo, hi):
        g = build_grid(20.0, 70.0, 1.0)
        ca_lo = cumulative_attrition(constant_profile(g, lo))
        ca_hi = cumulative_attrition(constant_profile(g, hi))
        assert np.all(ca_lo.M <= ca_hi.M + 1e-15)

    def test_negative_hazard_rejected(self, grid50):
        with pytest.raises(ValidationError):
            cumulative_attrition(constant_profile(grid50, -0.1))


class TestIntegrate:
    def test_constant_one(self, grid50):
        assert integrate(constant_profile(grid50, 1.0)) == pytest.approx(50.0, rel=1e-14)

    def test_zero(self, grid50):
        assert integrate(constant_profile(grid50, 0.0)) == 0.0

    def test_identity_profile_left_rule(self, grid50):
        p = AgeProfile(grid50, grid50.nodes.astype(float))
        # left-rectangle sum of z over [20, 70) at dz = 1
        assert integrate(p) == pytest.approx(2225.0, rel=1e-14)

    def test_identity_profile_refines_to_analytic(self):
        # exact integral is (70^2 - 20^2)/2 = 2250; gap shrinks O(dz)
        gaps = []
        for dz in (1.0, 0.5, 0.25):
            g = build_grid(20.0, 70.0, dz)
            gaps.append(abs(integrate(AgeProfile(g, g.nodes.astype(float))) - 2250.0))
        assert gaps[0] == pytest.approx(25.0, rel=1e-12)
        assert gaps[1] == pytest.approx(gaps[0] / 2, rel=1e-12)
        assert gaps[2] == pytest.approx(gaps[1] / 2, rel=1e-12)


class TestNormalizeDistribution:
    def test_uniform_density(self, grid50):
        d = normalize_distribution(constant_profile(grid50, 1.0))
        assert np.allclose(d.values, 0.02, rtol=1e-13)

    def test_single_cell_mass(self, grid50):
        raw = np.zeros(grid50.n + 1)
        raw[0] = 1.0
        d = normalize_distribution(AgeProfile(grid50, raw))
        assert d.values[0] == pytest.approx(1.0, rel=1e-13)
        assert np.all(d.values[1:] == 0.0)

    def test_proportional_rescale(self, grid50):
        raw = np.zeros(grid50.n + 1)
        raw[:3] = [2.0, 2.0, 1.0]
        d = normalize_distribution(AgeProfile(grid50, raw))
        assert np.allclose(d.values, raw / integrate(AgeProfile(grid50, raw)), rtol=1e-14)

    def test_all_zero_rejected(self, grid50):
        with pytest.raises(ValidationError):
            normalize_distribution(constant_profile(grid50, 0.0))

    def test_negative_rejected(self, grid50):
        raw = np.ones(grid50.n + 1)
        raw[5] = -0.5
        with pytest.raises(ValidationError):
            normalize_distribution(AgeProfile(grid50, raw))

    @given(seed=st.integers(0, 2**32 - 1))
    @settings(max_examples=40, deadline=None)
    def test_unit_mass_property(self, seed):
        rng = np.random.default_rng(seed)
        g = build_grid(20.0, 70.0, 1.0)
        raw = rng.uniform(0.0, 5.0, g.n + 1)
        raw[rng.integers(0, g.n)] += 1.0  # guarantee positive mass
        d = normalize_distribution(AgeProfile(g, raw))
        assert integrate(d) == pytest.approx(1.0, rel=1e-12)


class TestInterpolateProfile:
    def test_exact_at_control_points(self, grid50):
        p = interpolate_profile(grid50, [20.0, 45.0, 70.0], [1.0, 3.0, 2.0])
        assert p.values[0] == 1.0
        assert p.values[25] == 3.0
        assert p.values[-1] == 2.0
        # linear in between
        assert p.values[5] == pytest.approx(1.0 + 2.0 * 5 / 25, rel=1e-14)

    def test_endpoint_hold_outside_table(self, grid50):
        p = interpolate_profile(grid50, [25.0, 70.0], [1.0, 2.0])
        assert np.all(p.values[:5] == 1.0)  # below the table: nearest endpoint
        assert p.values[-1] == 2.0

    def test_ages_strictly_increasing(self, grid50):
        with pytest.raises(ValidationError):
            interpolate_profile(grid50, [20.0, 45.0, 45.0, 70.0], [1.0, 2.0, 3.0, 4.0])


class TestGridConsistency:
    def test_profile_grid_mismatch_rejected(self):
        g1 = build_grid(20.0, 70.0, 1.0)
        g2 = build_grid(20.0, 70.0, 0.5)
        mu = constant_profile(g1, 0.1)
        gam = normalize_distribution(constant_profile(g2, 1.0))
        with pytest.raises((ValidationError, GridError)):
            swp.recruitment_index(mu, gam)
