"""Curve models, Jacobians and the conformal ω-curve residual"""
from omegacurves.curve.models import (
    CurveModel, Affine, HolomorphicPolynomial, ComplexExp, Composite,
    finite_difference_jacobian, identity, zpower, zsquare, zcube, complex_exp,
    diagonal, isometry, constant, holomorphic_embedding, scaled, precompose,
    postcompose, curve_catalog, parse_curve_name, CURVES
)
from omegacurves.curve.residual import (
    ResidualReport, opnorm, energy_density, conformal_residual, verify_curve
)
from omegacurves.curve.specfile import loads_curve, load_curve
