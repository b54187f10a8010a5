"""Blow-down rescalings and properness radii"""
from omegacurves.blowdown.rescaling import (
    BlowdownReport, rescale, best_fit_isometry, isometry_deviation, blowdown_report
)
from omegacurves.blowdown.properness import PropernessRadii, properness_radii, properness_table
