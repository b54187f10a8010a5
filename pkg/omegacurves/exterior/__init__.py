"""Exact constant-coefficient exterior algebra"""
from omegacurves.exterior.algebra import (
    MultiIndex, AlternatingForm, Frame, as_jacobian,
    wedge, hodge_star, evaluate, pullback_top, pullback_linear, merge_sign
)
from omegacurves.exterior.textio import dumps_form, loads_form, dump_form, load_form
