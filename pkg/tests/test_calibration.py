"""
Tests for the calibration catalog and the comass estimator
"""
import numpy as np
import pytest

from omegacurves.calibration import (
    associative, brute_force_comass, catalog, cayley, comass, is_calibration, kahler_power,
    normalize, parse_form_name, special_lagrangian, symplectic, volume
)
from omegacurves.errors import DegenerateInputError, OmegaCurveError
from omegacurves.exterior import AlternatingForm, evaluate, pullback_linear
from omegacurves.utils.linalg import random_rotation


class TestCatalog:
    """Catalog conventions"""

    def test_volume_in_larger_ambient(self):
        form = volume(2, 4)
        assert form.ambient == 4
        assert form.coefficient((1, 2)) == 1.0

    def test_symplectic_terms(self):
        form = symplectic(3)
        assert len(form) == 3
        assert form.coefficient((5, 6)) == 1.0

    def test_kahler_square_is_volume(self):
        assert kahler_power(2, 2) == volume(4)

    def test_special_lagrangian_real_part(self):
        # Re(dz1 ∧ dz2) = dx1∧dx3 - dx2∧dx4
        form = special_lagrangian(2)
        assert form.coefficient((1, 3)) == pytest.approx(1.0)
        assert form.coefficient((2, 4)) == pytest.approx(-1.0)
        assert form.coefficient((1, 4)) == 0.0

    def test_special_lagrangian_phase(self):
        # θ = π/2 gives Im(dz1 ∧ dz2) = dx1∧dx4 + dx2∧dx3
        form = special_lagrangian(2, np.pi / 2)
        assert form.coefficient((1, 4)) == pytest.approx(1.0)
        assert form.coefficient((2, 3)) == pytest.approx(1.0)
        assert abs(form.coefficient((1, 3))) < 1e-15

    def test_associative_and_cayley_sizes(self):
        assert len(associative()) == 7
        phi = cayley()
        assert phi.degree == 4 and phi.ambient == 8
        assert len(phi) == 14
        assert all(abs(c) == 1.0 for _, c in phi.items())

    def test_parse_aliases(self):
        assert parse_form_name('sym:2') == symplectic(2)
        assert parse_form_name('vol:2,4') == volume(2, 4)
        assert parse_form_name('slag:2,0') == special_lagrangian(2, 0.0)
        assert parse_form_name('kahler:3,2') == kahler_power(3, 2)

    def test_unknown_name(self):
        with pytest.raises(OmegaCurveError):
            catalog('hyperkahler', 2)

    def test_bad_parameter(self):
        with pytest.raises(OmegaCurveError):
            parse_form_name('symplectic:two')


class TestComass:
    """Multi-start ascent comass"""

    @pytest.mark.parametrize('name', ['volume:3', 'symplectic:2', 'kahler_power:3,2', 'slag:2,0', 'slag:3,0.7'])
    def test_catalog_has_unit_comass(self, name):
        report = comass(parse_form_name(name), restarts=8, seed=1)
        assert report.estimate == pytest.approx(1.0, abs=1e-6)
        assert report.converged

    @pytest.mark.parametrize('form', [associative(), cayley()], ids=['associative', 'cayley'])
    def test_exceptional_calibrations(self, form):
        report = comass(form, restarts=16, seed=3)
        assert report.estimate == pytest.approx(1.0, abs=1e-6)

    def test_split_volume_forms(self):
        # e123 + e456 on R^6
        form = AlternatingForm(3, 6, {(1, 2, 3): 1.0, (4, 5, 6): 1.0})
        assert comass(form, restarts=8, seed=2).estimate == pytest.approx(1.0, abs=1e-6)

    def test_estimate_is_attained_by_best_frame(self):
        form = symplectic(2)
        report = comass(form, restarts=4, seed=0)
        assert report.best_frame.is_orthonormal()
        assert evaluate(form, report.best_frame) == report.estimate

    def test_estimate_below_certified_bound(self, rng):
        form = AlternatingForm(2, 5, {(1, 2): 1.0, (1, 3): 0.5, (2, 5): -0.7, (4, 5): 0.3})
        report = comass(form, restarts=8, seed=4)
        assert report.estimate <= report.certified_upper_bound

    @pytest.mark.parametrize('factor', [3.0, 0.25, -1.0, -2.5])
    def test_absolutely_homogeneous(self, factor):
        form = AlternatingForm(2, 4, {(1, 2): 1.0, (1, 3): 0.4, (3, 4): -0.6})
        base = comass(form, restarts=8, seed=5).estimate
        scaled = comass(form * factor, restarts=8, seed=5).estimate
        assert scaled == pytest.approx(abs(factor) * base, rel=1e-12)

    def test_rotation_invariant(self, rng):
        form = symplectic(2)
        rotated = pullback_linear(form, random_rotation(rng, 4))
        assert comass(rotated, restarts=8, seed=6).estimate == pytest.approx(1.0, abs=1e-6)

    def test_more_restarts_never_lower_the_estimate(self):
        form = AlternatingForm(2, 5, {(1, 2): 1.0, (1, 3): 0.5, (2, 5): -0.7, (4, 5): 0.3, (3, 4): 0.9})
        few = comass(form, restarts=3, seed=8)
        many = comass(form, restarts=9, seed=8)
        assert many.estimate >= few.estimate - 1e-12
        assert many.restart_values[:3] == few.restart_values

    def test_same_seed_same_result(self):
        form = special_lagrangian(2)
        first = comass(form, restarts=4, seed=11)
        second = comass(form, restarts=4, seed=11)
        assert first.estimate == second.estimate
        assert first.restart_iterations == second.restart_iterations

    def test_parallel_restarts_match_serial(self):
        form = symplectic(2)
        serial = comass(form, restarts=4, seed=12, n_jobs=1)
        parallel = comass(form, restarts=4, seed=12, n_jobs=2)
        assert serial.restart_values == parallel.restart_values

    def test_brute_force_agrees(self):
        form = AlternatingForm(2, 4, {(1, 2): 1.0, (1, 3): 0.4, (3, 4): -0.6})
        estimate = comass(form, restarts=8, seed=0).estimate
        oracle = brute_force_comass(form, samples=20_000, seed=0, polish=4)
        assert estimate == pytest.approx(oracle, abs=1e-6)

    @pytest.mark.parametrize('name', ['volume:3', 'volume:2,4', 'symplectic:3', 'kahler_power:3,2', 'slag:2,0',
                                      'slag:3,0.7', 'associative', 'cayley'])
    def test_brute_force_agrees_on_catalog(self, name):
        form = parse_form_name(name)
        estimate = comass(form, restarts=16, seed=7).estimate
        oracle = brute_force_comass(form, samples=20_000, seed=7, polish=8)
        assert estimate == pytest.approx(oracle, abs=1e-6)
        assert oracle == pytest.approx(1.0, abs=1e-6)

    def test_brute_force_flips_negative_frames(self):
        # the best sampled frame may score negative; it is polished with one vector flipped
        for seed in range(4):
            assert brute_force_comass(-volume(2, 4), samples=200, seed=seed, polish=1) == pytest.approx(1.0, abs=1e-9)

    def test_zero_form_rejected(self):
        with pytest.raises(DegenerateInputError):
            comass(AlternatingForm.zero(2, 4))

    def test_restarts_must_be_positive(self):
        with pytest.raises(OmegaCurveError):
            comass(symplectic(2), restarts=0)

    def test_report_serializes(self):
        data = comass(volume(2), restarts=2, seed=0).to_dict()
        assert data['restarts_used'] == 2
        assert len(data['best_frame']) == 2


class TestCalibrationChecks:
    """is_calibration and normalize"""

    def test_symplectic_is_calibration(self):
        verdict = is_calibration(symplectic(2), restarts=8, seed=0)
        assert verdict
        assert verdict.estimate == pytest.approx(1.0, abs=1e-6)

    def test_scaled_volume_is_not(self):
        verdict = is_calibration(volume(2) * 2.0, restarts=4, seed=0)
        assert not verdict
        assert verdict.estimate == pytest.approx(2.0, abs=1e-9)

    def test_normalize_gives_unit_comass(self):
        form = symplectic(2) * 2.5
        unit = normalize(form, comass(form, restarts=8, seed=0))
        assert comass(unit, restarts=8, seed=1).estimate == pytest.approx(1.0, abs=1e-6)
