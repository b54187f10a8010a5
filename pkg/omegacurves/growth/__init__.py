"""Energy growth: ball and sphere averages, monotonicity and the growth dichotomy"""
from omegacurves.growth.averages import (
    CaccioppoliRatio, MassRatio, unit_ball_volume, ball_average, sphere_average, h_prime,
    isoperimetric_gap, modulus_constant, image_diameter, caccioppoli_ratio, mass_ratio,
    lipschitz_estimate
)
from omegacurves.growth.subharmonic import (
    RichardsonCheck, laplacian_grid, richardson_improvement, subharmonicity_min, subharmonicity_richardson
)
from omegacurves.growth.profile import (
    EnergyProfile, GrowthVerdict, AFFINE_BOUNDED, SUPER_EUCLIDEAN, INCONCLUSIVE,
    geometric_radii, monotonicity_margin, energy_profile, doubling_ratios,
    affinity_residual, classify_growth, diameter_growth, mass_ratio_profile
)
