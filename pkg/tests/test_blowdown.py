"""
Tests for blow-down rescalings, isometry deviations and properness radii
"""
import math

import numpy as np
import pytest

from omegacurves.blowdown import (
    best_fit_isometry, blowdown_report, isometry_deviation, properness_radii, properness_table, rescale
)
from omegacurves.curve import (
    Affine, Composite, complex_exp, holomorphic_embedding, identity, isometry, postcompose, precompose,
    zcube, zsquare
)
from omegacurves.errors import DegenerateInputError, DimensionMismatchError, OmegaCurveError
from omegacurves.growth import ball_average
from omegacurves.utils.linalg import has_orthonormal_columns, random_rotation


class TestRescale:
    """x -> (F(y + r x) - F(y)) / r"""

    def test_affine_collapses_to_linear_part(self):
        model = isometry(2, 4, seed=1)
        blown = rescale(model, [0.3, 0.7], 5.0)
        assert isinstance(blown, Affine)
        assert np.array_equal(blown.A, model.A)
        assert np.all(blown.b == 0)
        assert blown.isometric

    def test_zsquare_at_origin(self, rng):
        X = rng.uniform(-1, 1, (10, 2))
        blown = rescale(zsquare(), [0.0, 0.0], 3.0)
        assert isinstance(blown, Composite)
        assert np.allclose(blown.eval(X), 3.0 * zsquare().eval(X), rtol=1e-12, atol=1e-12)

    def test_fixes_the_origin(self):
        blown = rescale(zcube(), [0.4, -0.1], 2.0)
        assert np.array_equal(blown.eval([0.0, 0.0]), [0.0, 0.0])

    def test_groupoid_law(self, rng):
        X = rng.uniform(-1, 1, (20, 2))
        y = [0.3, 0.1]
        twice = rescale(rescale(zsquare(), y, 2.0), [0.0, 0.0], 3.0)
        once = rescale(zsquare(), y, 6.0)
        assert np.allclose(twice.eval(X), once.eval(X), rtol=0, atol=1e-12)

    def test_energy_transfers_to_unit_ball(self):
        # h_{F_r}(1) at the origin equals h_F(r) at the anchor
        y = np.array([0.5, 0.2])
        for model in (zsquare(), zcube(), complex_exp()):
            direct, _ = ball_average(model, y, 2.0, samples=4_000, seed=3)
            blown, _ = ball_average(rescale(model, y, 2.0), [0.0, 0.0], 1.0, samples=4_000, seed=3)
            assert blown == pytest.approx(direct, rel=1e-12)

    def test_scale_must_be_positive(self):
        with pytest.raises(OmegaCurveError):
            rescale(zsquare(), [0.0, 0.0], 0.0)

    def test_anchor_dimension(self):
        with pytest.raises(DimensionMismatchError):
            rescale(zsquare(), [0.0, 0.0, 0.0], 1.0)


class TestIsometryDeviation:
    """Distance of a blow-down to its best-fit linear isometry"""

    def test_linear_isometry_has_zero_deviation(self, linear_isometry):
        deviation, G = isometry_deviation(linear_isometry, seed=0)
        assert deviation <= 1e-12
        assert np.allclose(G, linear_isometry.A, atol=1e-12)

    def test_rotated_identity(self, rng):
        model = precompose(identity(2), random_rotation(rng, 2))
        deviation, G = isometry_deviation(model, seed=1)
        assert deviation <= 1e-12

    def test_best_fit_has_orthonormal_columns(self, rng):
        X = rng.standard_normal((50, 2))
        Y = rng.standard_normal((50, 4))
        assert has_orthonormal_columns(best_fit_isometry(X, Y), 1e-10)

    def test_square_best_fit_preserves_orientation(self, rng):
        X = rng.standard_normal((30, 3))
        Y = X * np.array([1.0, 1.0, -1.0])
        G = best_fit_isometry(X, Y)
        assert np.linalg.det(G) == pytest.approx(1.0)

    def test_invariant_under_target_rotation(self, rng):
        model = holomorphic_embedding([0, 1], [0, 0, 0.1])
        sample = rng.uniform(-1, 1, (200, 2))
        rotated = postcompose(model, random_rotation(rng, 4))
        base, _ = isometry_deviation(model, sample)
        moved, _ = isometry_deviation(rotated, sample)
        assert moved == pytest.approx(base, abs=1e-10)

    def test_zsquare_is_far_from_isometric(self):
        deviation, _ = isometry_deviation(rescale(zsquare(), [0.0, 0.0], 1.0), seed=0)
        assert deviation > 0.1

    def test_rank_deficient_sample(self):
        line = np.column_stack([np.linspace(-1, 1, 20), np.zeros(20)])
        with pytest.raises(DegenerateInputError):
            isometry_deviation(identity(2), line)

    def test_too_few_points(self):
        with pytest.raises(DegenerateInputError):
            isometry_deviation(identity(2), np.array([[0.0, 0.0], [1.0, 0.0]]))


class TestBlowdownReport:
    """Blow-down diagnostics over a grid of scales"""

    def test_isometry_satisfies_hypotheses(self):
        report = blowdown_report(isometry(2, 4, seed=2), [0.1, -0.3], [1.0, 4.0, 16.0],
                                 sample_points=200, samples=2_000, seed=0)
        assert report.hypothesis_satisfied
        assert max(report.deviations) <= 1e-12
        assert report.deviations_decreasing
        assert report.energies == pytest.approx((1.0, 1.0, 1.0), rel=1e-12)

    def test_exp_violates_hypotheses(self):
        report = blowdown_report(complex_exp(), [0.0, 0.0], [1.0, 4.0, 16.0],
                                 sample_points=200, samples=4_000, seed=1)
        assert not report.hypothesis_satisfied
        assert not all(report.energy_normalized)
        assert not all(report.one_lipschitz)

    def test_report_serializes(self):
        report = blowdown_report(identity(2), [0.0, 0.0], [1.0, 2.0], sample_points=100, samples=2_000, seed=0)
        data = report.to_dict()
        assert data['scales'] == [1.0, 2.0]
        assert data['hypothesis_satisfied'] is True
        assert len(data['best_fit']) == 2

    def test_parallel_matches_serial(self):
        args = dict(sample_points=100, samples=2_000, seed=4)
        serial = blowdown_report(zsquare(), [0.5, 0.0], [1.0, 2.0, 4.0], n_jobs=1, **args)
        parallel = blowdown_report(zsquare(), [0.5, 0.0], [1.0, 2.0, 4.0], n_jobs=2, **args)
        assert serial.deviations == parallel.deviations
        assert serial.energies == parallel.energies

    def test_scales_must_increase(self):
        with pytest.raises(OmegaCurveError):
            blowdown_report(zsquare(), [0.0, 0.0], [2.0, 1.0])


class TestProperness:
    """Inner and outer radii sandwiching the preimage of a ball"""

    @pytest.mark.parametrize('model', [identity(2), isometry(2, 4, seed=3)], ids=['identity', 'isometry'])
    def test_isometries_have_equal_radii(self, model):
        result = properness_radii(model, [0.2, -0.1], 2.0, resolution=1e-3, max_radius=100.0,
                                  directions=2_000, seed=0)
        assert abs(result.s_r - 2.0) <= result.resolution
        assert abs(result.S_r - 2.0) <= result.resolution
        assert result.ordered
        assert result.outer_verified
        assert result.r <= result.s_r + result.resolution

    def test_zsquare_radii(self):
        result = properness_radii(zsquare(), [0.0, 0.0], 4.0, resolution=1e-3, max_radius=100.0,
                                  directions=2_000, seed=0)
        assert abs(result.s_r - 2.0) <= 2 * result.resolution
        assert abs(result.S_r - 2.0) <= 2 * result.resolution

    def test_exp_is_not_proper(self):
        # |e^{iy} - 1| <= 2 on the imaginary axis, so no sphere clears radius 3
        result = properness_radii(complex_exp(), [0.0, 0.0], 3.0, resolution=1e-2, max_radius=100.0,
                                  directions=2_000, seed=0)
        assert result.outer_capped
        assert math.isinf(result.S_r)
        assert result.to_dict()['S_r'] == '>= 100'
        assert result.s_r == pytest.approx(math.log(4.0), abs=2e-2)

    def test_table(self):
        rows = properness_table(identity(2), [0.0, 0.0], [1.0, 2.0], max_radius=10.0, directions=500, seed=0)
        assert [row.r for row in rows] == [1.0, 2.0]

    def test_invalid_resolution(self):
        with pytest.raises(OmegaCurveError):
            properness_radii(identity(2), [0.0, 0.0], 1.0, resolution=0.0)

    def test_center_dimension(self):
        with pytest.raises(DimensionMismatchError):
            properness_radii(identity(2), [0.0], 1.0)
