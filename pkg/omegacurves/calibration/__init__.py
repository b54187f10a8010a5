"""Calibration catalog and numerical comass"""
from omegacurves.calibration.catalog import (
    catalog, parse_form_name, volume, symplectic, kahler_power,
    special_lagrangian, associative, cayley, CATALOG
)
from omegacurves.calibration.comass import (
    ComassReport, CalibrationVerdict, AscentResult,
    comass, brute_force_comass, normalize, is_calibration, ascend
)
