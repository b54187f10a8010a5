"""Operator norms and the conformal ω-curve residual ‖DF‖ⁿ − ⋆F*ω"""
from dataclasses import dataclass, field
import logging

import numpy as np
import pandas as pd

from omegacurves.errors import DimensionMismatchError, OmegaCurveError
from omegacurves.exterior import as_jacobian, pullback_top
from omegacurves.utils.seeding import get_rng

logger = logging.getLogger(__name__)

RESIDUAL_TOL = 1e-9
COMASS_BOUND_TOL = 1e-8


def opnorm(J):
    """Largest singular value of a Jacobian (or a stack of them)

    Columns n <= 2 use the closed-form eigenvalue of the 2x2 Gram matrix;
    wider Jacobians go through LAPACK's SVD.
    """
    J = as_jacobian(J)
    n = J.shape[-1]
    if n == 1:
        return np.linalg.norm(J[..., 0], axis=-1)
    if n == 2:
        a = np.sum(J[..., 0] ** 2, axis=-1)
        b = np.sum(J[..., 0] * J[..., 1], axis=-1)
        c = np.sum(J[..., 1] ** 2, axis=-1)
        largest = (a + c + np.sqrt((a - c) ** 2 + 4 * b * b)) / 2
        return np.sqrt(largest)
    return np.linalg.svd(J, compute_uv=False)[..., 0]


def energy_density(J, p):
    """‖DF‖^p from Jacobians"""
    return opnorm(J) ** p


def _check_dimensions(model, form):
    if form.degree != model.n:
        raise DimensionMismatchError('form degree vs curve domain dimension', model.n, form.degree)
    if form.ambient != model.m:
        raise DimensionMismatchError('form ambient vs curve target dimension', model.m, form.ambient)


def conformal_residual(model, form, x, comass_bound_tol=None):
    """r(x) = ‖DF(x)‖ⁿ − ⋆F*ω(x)

    Args:
        model (CurveModel): Curve R^n -> R^m
        form (AlternatingForm): Degree-n form on R^m
        x (ndarray): Point (n,) or batch (N, n)
        comass_bound_tol (float): When given, ω is treated as a unit-comass
            calibration and a residual below -comass_bound_tol raises

    Returns:
        float or ndarray: Residual values
    """
    _check_dimensions(model, form)
    J = model.jacobian(x)
    residual = opnorm(J) ** model.n - pullback_top(form, J)
    if comass_bound_tol is not None and np.min(residual) < -comass_bound_tol:
        raise OmegaCurveError(
            f"comass bound violated: residual {np.min(residual):.3e} below -{comass_bound_tol:g}; "
            "the form is not a unit-comass calibration"
        )
    return residual


@dataclass(frozen=True)
class ResidualReport:
    """Sampled residuals of the generalized Cauchy–Riemann equation"""
    points: np.ndarray = field(repr=False)
    residuals: np.ndarray = field(repr=False)
    max_abs: float
    tolerance: float
    passed: bool
    samples: int
    seed: int
    region: dict

    def to_frame(self):
        frame = pd.DataFrame(self.points, columns=[f'x{i + 1}' for i in range(self.points.shape[1])])
        frame['residual'] = self.residuals
        return frame

    def summary(self):
        return {
            'max_abs_residual': self.max_abs,
            'min_residual': float(np.min(self.residuals)),
            'tolerance': self.tolerance,
            'passed': self.passed,
            'samples': self.samples,
            'seed': self.seed,
            'region': self.region,
        }


def verify_curve(model, form, region, samples=1000, seed=0, tol=RESIDUAL_TOL):
    """Sample a region and test ‖DF‖ⁿ = ⋆F*ω pointwise

    Args:
        model (CurveModel): Curve to test
        form (AlternatingForm): Calibration ω
        region (Ball | Box | Annulus): Bounded sampling region
        samples (int): Number of sample points
        seed (int): Master seed
        tol (float): Pass threshold on max |r|

    Returns:
        ResidualReport: Points, residuals and the verdict
    """
    _check_dimensions(model, form)
    if region.dim != model.n:
        raise DimensionMismatchError('region dimension', model.n, region.dim)
    if samples < 1:
        raise OmegaCurveError(f"samples must be positive, got {samples}")
    points = region.sample(get_rng(seed), samples)
    residuals = np.atleast_1d(conformal_residual(model, form, points))
    max_abs = float(np.max(np.abs(residuals)))
    passed = max_abs <= tol
    if not passed:
        logger.info(f"{model.name} fails the Cauchy–Riemann check: max |r| = {max_abs:.3e} > {tol:g}")
    return ResidualReport(
        points=points,
        residuals=residuals,
        max_abs=max_abs,
        tolerance=tol,
        passed=passed,
        samples=samples,
        seed=seed,
        region=region.describe(),
    )
