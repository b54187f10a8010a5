"""
Tests for curve models, the conformal residual and curve spec files
"""
import numpy as np
import pytest
from scipy.linalg import null_space

from omegacurves.calibration import associative, cayley, kahler_power, special_lagrangian, symplectic, volume
from omegacurves.curve import (
    Affine, Composite, ComplexExp, HolomorphicPolynomial, complex_exp, conformal_residual, constant, diagonal,
    finite_difference_jacobian, holomorphic_embedding, identity, isometry, loads_curve, opnorm,
    parse_curve_name, postcompose, precompose, scaled, verify_curve, zcube, zsquare
)
from omegacurves.errors import DimensionMismatchError, FormatParseError, OmegaCurveError
from omegacurves.exterior import pullback_linear
from omegacurves.utils.linalg import random_orthonormal, random_rotation
from omegacurves.utils.sampling import Annulus, Ball, Box

CALIBRATIONS = [
    volume(2), volume(2, 4), symplectic(2), symplectic(3), special_lagrangian(2, 0.3), volume(3),
    special_lagrangian(3, 0.7), kahler_power(3, 2), associative(), cayley(),
]


def curve_models(rng, n, m):
    """A few curves R^n -> R^m with generic Jacobians"""
    models = [Affine(rng.standard_normal((m, n)))]
    if n == 2:
        models.append(postcompose(complex_exp(), rng.standard_normal((m, 2))))
        models.append(postcompose(zcube(), rng.standard_normal((m, 2))))
        if m % 2 == 0:
            components = [rng.standard_normal(3) + 1j * rng.standard_normal(3) for _ in range(m // 2)]
            models.append(holomorphic_embedding(*components))
    else:
        models.append(precompose(postcompose(identity(n), rng.standard_normal((m, n))), random_rotation(rng, n)))
    return models


def residual_pairs(rng):
    return [
        (zcube(), volume(2)),
        (holomorphic_embedding([0, 1], [0, 0, 1]), symplectic(2)),
        (diagonal(2.0, 1.0), volume(2)),
        (Affine(rng.standard_normal((6, 3))), special_lagrangian(3, 0.7)),
    ]


class TestModels:
    """Evaluation of catalog models"""

    def test_zsquare_value(self):
        assert np.allclose(zsquare().eval([1.0, 1.0]), [0.0, 2.0])

    def test_zcube_value(self):
        # (1 + i)^3 = -2 + 2i
        assert np.allclose(zcube().eval([1.0, 1.0]), [-2.0, 2.0])

    def test_exp_value(self):
        assert np.allclose(ComplexExp().eval([0.0, np.pi]), [-1.0, 0.0], atol=1e-15)

    def test_batch_shapes(self, rng):
        X = rng.standard_normal((6, 2))
        model = holomorphic_embedding([0, 1], [0, 0, 1])
        assert model.eval(X).shape == (6, 4)
        assert model.jacobian(X).shape == (6, 4, 2)

    def test_point_dimension_checked(self):
        with pytest.raises(DimensionMismatchError):
            identity(3).eval([1.0, 2.0])

    def test_non_finite_point_rejected(self):
        with pytest.raises(OmegaCurveError):
            zsquare().eval([np.nan, 0.0])

    @pytest.mark.parametrize('model', [zsquare(), zcube(), ComplexExp(), holomorphic_embedding([0, 1], [1, 0, 0.5j]),
                                       diagonal(2.0, 1.0)], ids=lambda m: m.name)
    def test_jacobian_matches_finite_difference(self, rng, model):
        X = rng.uniform(-1, 1, size=(20, model.n))
        assert np.allclose(model.jacobian(X), finite_difference_jacobian(model, X), atol=1e-6)

    def test_composite_jacobian(self, rng):
        A = np.array([[2.0, 0.3], [-0.1, 1.5]])
        model = postcompose(precompose(zsquare(), A, [0.2, -0.4]), random_orthonormal(rng, 3, 2), [1.0, 0.0, 0.0])
        X = rng.uniform(-1, 1, size=(10, 2))
        assert np.allclose(model.jacobian(X), finite_difference_jacobian(model, X), atol=1e-6)

    def test_isometry_has_orthonormal_columns(self):
        model = isometry(2, 4, seed=3)
        assert np.allclose(model.A.T @ model.A, np.eye(2), atol=1e-12)
        assert model.is_one_lipschitz

    def test_false_isometric_claim_rejected(self):
        with pytest.raises(OmegaCurveError):
            Affine([[2.0, 0.0], [0.0, 1.0]], isometric=True)

    def test_composite_needs_invertible_pre_map(self):
        with pytest.raises(OmegaCurveError):
            precompose(zsquare(), [[1.0, 1.0], [1.0, 1.0]])

    def test_scaled(self):
        model = scaled(zsquare(), 2.0)
        assert np.allclose(model.eval([1.0, 1.0]), [0.0, 1.0])

    def test_critical_points(self):
        assert np.allclose(zsquare().critical_points(), [[0.0, 0.0]])
        assert len(ComplexExp().critical_points()) == 0
        assert constant(2, 2).critical_points() is None

    def test_lipschitz_constants(self):
        assert identity(3).lipschitz_constant == pytest.approx(1.0)
        assert diagonal(2.0, 1.0).lipschitz_constant == pytest.approx(2.0)
        assert zsquare().lipschitz_constant == np.inf

    def test_parse_curve_names(self):
        assert parse_curve_name('identity:3').n == 3
        assert parse_curve_name('isometry:2,5,1').m == 5
        assert isinstance(parse_curve_name('zpower:4'), HolomorphicPolynomial)
        with pytest.raises(OmegaCurveError):
            parse_curve_name('spiral')


class TestResidual:
    """The conformal ω-curve residual ‖DF‖ⁿ - ⋆F*ω"""

    def test_opnorm_matches_svd(self, rng):
        for n in (1, 2, 3):
            J = rng.standard_normal((7, 5, n))
            expected = np.linalg.svd(J, compute_uv=False)[:, 0]
            assert np.allclose(opnorm(J), expected, rtol=1e-12)

    def test_identity_passes(self):
        report = verify_curve(identity(3), volume(3), Ball(np.zeros(3), 1.0), samples=200, seed=0)
        assert report.passed
        assert report.max_abs <= 1e-12

    @pytest.mark.parametrize('model', [zsquare(), zcube(), ComplexExp()], ids=lambda m: m.name)
    def test_holomorphic_maps_pass_against_area_form(self, model):
        report = verify_curve(model, volume(2), Ball([0.3, -0.2], 1.0), samples=500, seed=1)
        assert report.passed

    def test_holomorphic_embedding_against_kahler_form(self):
        model = holomorphic_embedding([0, 1], [0, 0, 1])
        report = verify_curve(model, symplectic(2), Box([-1, -1], [1, 1]), samples=500, seed=2)
        assert report.passed

    def test_isometry_against_its_plane(self):
        model = isometry(2, 4, seed=5)
        # a rotation of R^4 carrying e1, e2 onto the columns of A
        Q = np.hstack([model.A, null_space(model.A.T)])
        form = pullback_linear(volume(2, 4), Q.T)
        report = verify_curve(model, form, Ball([0.0, 0.0], 2.0), samples=300, seed=3)
        assert report.passed

    def test_special_lagrangian_plane(self):
        # R^2 -> R^4 onto the real plane x2 = x4 = 0, calibrated by Re(dz1 ∧ dz2)
        model = Affine([[1, 0], [0, 0], [0, 1], [0, 0]], isometric=True)
        report = verify_curve(model, special_lagrangian(2), Ball([0.0, 0.0], 1.0), samples=100, seed=0)
        assert report.passed

    def test_diagonal_counterexample_fails(self):
        report = verify_curve(diagonal(2.0, 1.0), volume(2), Ball([0.0, 0.0], 1.0), samples=200, seed=0)
        assert not report.passed
        assert report.max_abs == pytest.approx(2.0, abs=1e-12)

    def test_dimension_mismatch_names_both(self):
        with pytest.raises(DimensionMismatchError) as excinfo:
            verify_curve(identity(3), volume(2), Ball(np.zeros(3), 1.0))
        assert excinfo.value.expected == 3
        assert excinfo.value.actual == 2

    def test_region_dimension_checked(self):
        with pytest.raises(DimensionMismatchError):
            verify_curve(zsquare(), volume(2), Ball(np.zeros(3), 1.0))

    def test_comass_bound_violation_raises(self):
        with pytest.raises(OmegaCurveError):
            conformal_residual(identity(2), volume(2) * 2.0, [[0.1, 0.2]], comass_bound_tol=1e-8)

    def test_residual_nonnegative_for_unit_comass_forms(self, rng):
        # ‖DF‖ⁿ >= ⋆F*ω holds for every map once ω has comass one
        model = diagonal(2.0, 0.5)
        values = conformal_residual(model, volume(2), rng.uniform(-1, 1, (50, 2)), comass_bound_tol=1e-12)
        assert np.all(values >= 0)

    @pytest.mark.parametrize('form', CALIBRATIONS, ids=lambda f: f'deg{f.degree}-R{f.ambient}-{len(f)}terms')
    def test_energy_density_bounds_every_calibration(self, rng, form):
        n, m = form.degree, form.ambient
        X = rng.uniform(-1, 1, (40, n))
        for model in curve_models(rng, n, m):
            values = conformal_residual(model, form, X)
            scale = opnorm(model.jacobian(X)) ** n
            assert np.all(values >= -1e-10 * np.maximum(scale, 1.0)), model.name

    def test_domain_rotation_leaves_residual_unchanged(self, rng):
        for model, form in residual_pairs(rng):
            Q = random_rotation(rng, model.n)
            X = rng.uniform(-1, 1, (30, model.n))
            rotated = conformal_residual(precompose(model, Q), form, X)
            assert np.allclose(rotated, conformal_residual(model, form, X @ Q.T), rtol=1e-9, atol=1e-9)

    def test_target_rotation_carries_the_form_along(self, rng):
        # R∘F is an (R⁻¹)*ω-curve exactly when F is an ω-curve
        for model, form in residual_pairs(rng):
            R = random_rotation(rng, model.m)
            X = rng.uniform(-1, 1, (30, model.n))
            moved = conformal_residual(postcompose(model, R), pullback_linear(form, R.T), X)
            assert np.allclose(moved, conformal_residual(model, form, X), rtol=1e-9, atol=1e-9)

    def test_report_frame(self):
        report = verify_curve(zsquare(), volume(2), Annulus([0, 0], 0.5, 1.0), samples=40, seed=0)
        frame = report.to_frame()
        assert list(frame.columns) == ['x1', 'x2', 'residual']
        assert len(frame) == 40
        assert report.summary()['region']['type'] == 'annulus'

    def test_seeded_points_repeat(self):
        first = verify_curve(zsquare(), volume(2), Ball([0, 0], 1.0), samples=20, seed=9)
        second = verify_curve(zsquare(), volume(2), Ball([0, 0], 1.0), samples=20, seed=9)
        assert np.array_equal(first.points, second.points)


class TestSpecFile:
    """Curve spec text format"""

    def test_affine(self):
        model = loads_curve("curve affine\nrow 1 0\nrow 0 1\nrow 0 0\noffset 0 0 2\nisometric\n")
        assert isinstance(model, Affine)
        assert model.isometric
        assert np.allclose(model.eval([1.0, 2.0]), [1.0, 2.0, 2.0])

    def test_holomorphic(self):
        model = loads_curve("curve holomorphic\ncomponent 0 0  0 0  1 0   # z^2\n")
        assert np.allclose(model.eval([1.0, 1.0]), zsquare().eval([1.0, 1.0]))

    def test_exp_and_catalog(self):
        assert isinstance(loads_curve("curve exp\n"), ComplexExp)
        assert loads_curve("curve catalog\nname identity:3\n").n == 3

    def test_composite(self):
        text = "\n".join([
            "curve composite",
            "core zsquare",
            "pre-row 1 0",
            "pre-row 0 1",
            "pre-offset 1 0",
            "post-row 1 0",
            "post-row 0 1",
            "post-row 0 0",
            "post-offset 0 0 3",
        ])
        model = loads_curve(text)
        assert isinstance(model, Composite)
        # (0 + 1)^2 = 1
        assert np.allclose(model.eval([0.0, 0.0]), [1.0, 0.0, 3.0])

    def test_unknown_keyword_names_line(self):
        with pytest.raises(FormatParseError) as excinfo:
            loads_curve("curve affine\nrow 1 0\nmatrix 0 1\n")
        assert excinfo.value.line_no == 3

    def test_odd_coefficient_count(self):
        with pytest.raises(FormatParseError) as excinfo:
            loads_curve("curve holomorphic\ncomponent 0 0 1\n")
        assert excinfo.value.line_no == 2

    def test_unknown_variant(self):
        with pytest.raises(FormatParseError):
            loads_curve("curve spiral\n")

    def test_ragged_rows(self):
        with pytest.raises(FormatParseError):
            loads_curve("curve affine\nrow 1 0\nrow 1\n")

    def test_non_numeric_entry(self):
        with pytest.raises(FormatParseError) as excinfo:
            loads_curve("curve affine\nrow 1 x\n")
        assert str(excinfo.value).startswith('line 2:')
