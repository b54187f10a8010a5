"""Curve-spec text format used by the CLI

A spec starts with ``curve <variant>`` followed by one keyword line per
parameter. Matrices are written row by row, complex coefficients as
(re, im) pairs from the constant term upwards, ``#`` starts a comment::

    curve affine
    row 2 0
    row 0 1
    offset 0 0

    curve holomorphic
    component 0 0  0 0  1 0      # z^2
    component 0 0  1 0           # z

    curve exp

    curve catalog
    name zcube

    curve composite
    core zsquare
    pre-row 1 0
    pre-row 0 1
    pre-offset 0.5 0
    post-row 1 0
    post-row 0 1
    post-row 0 0
    post-offset 0 0 3
"""
import numpy as np

from omegacurves.curve.models import Affine, Composite, ComplexExp, HolomorphicPolynomial, parse_curve_name
from omegacurves.errors import FormatParseError, OmegaCurveError

VARIANTS = ('affine', 'holomorphic', 'exp', 'catalog', 'composite')


def _numbers(tokens, line_no, line):
    try:
        return [float(t) for t in tokens]
    except ValueError:
        raise FormatParseError("expected real numbers", line_no, line)


def _affine(rows, offset, isometric, where):
    if not rows:
        return None
    widths = {len(r) for r in rows}
    if len(widths) != 1:
        raise FormatParseError(f"{where} rows have different lengths {sorted(widths)}")
    return Affine(np.array(rows), offset, isometric=isometric)


def loads_curve(text):
    """Parse a curve spec into a CurveModel

    Raises:
        FormatParseError: naming the offending line
    """
    variant = None
    rows, offset, isometric = [], None, False
    pre_rows, pre_offset, post_rows, post_offset = [], None, [], None
    components, core = [], None
    for line_no, line in enumerate(text.splitlines(), start=1):
        content = line.split('#', 1)[0].strip()
        if not content:
            continue
        keyword, *tokens = content.split()
        if variant is None:
            if keyword != 'curve' or len(tokens) != 1:
                raise FormatParseError("expected 'curve <variant>' header", line_no, line)
            variant = tokens[0]
            if variant not in VARIANTS:
                raise FormatParseError(f"unknown variant, choose from {', '.join(VARIANTS)}", line_no, line)
            continue
        if variant == 'affine' and keyword == 'row':
            rows.append(_numbers(tokens, line_no, line))
        elif variant == 'affine' and keyword == 'offset':
            offset = _numbers(tokens, line_no, line)
        elif variant == 'affine' and keyword == 'isometric' and not tokens:
            isometric = True
        elif variant == 'holomorphic' and keyword == 'component':
            values = _numbers(tokens, line_no, line)
            if not values or len(values) % 2:
                raise FormatParseError("coefficients must come as (re, im) pairs", line_no, line)
            components.append([complex(values[i], values[i + 1]) for i in range(0, len(values), 2)])
        elif variant in ('catalog', 'composite') and keyword in ('name', 'core') and len(tokens) == 1:
            try:
                core = parse_curve_name(tokens[0])
            except OmegaCurveError as e:
                raise FormatParseError(str(e), line_no, line)
        elif variant == 'composite' and keyword == 'pre-row':
            pre_rows.append(_numbers(tokens, line_no, line))
        elif variant == 'composite' and keyword == 'pre-offset':
            pre_offset = _numbers(tokens, line_no, line)
        elif variant == 'composite' and keyword == 'post-row':
            post_rows.append(_numbers(tokens, line_no, line))
        elif variant == 'composite' and keyword == 'post-offset':
            post_offset = _numbers(tokens, line_no, line)
        else:
            raise FormatParseError(f"unexpected keyword '{keyword}' for curve {variant}", line_no, line)

    if variant is None:
        raise FormatParseError("empty curve spec")
    try:
        if variant == 'affine':
            if not rows:
                raise FormatParseError("affine curve needs at least one 'row' line")
            return _affine(rows, offset, isometric, 'affine')
        if variant == 'holomorphic':
            if not components:
                raise FormatParseError("holomorphic curve needs at least one 'component' line")
            return HolomorphicPolynomial(components)
        if variant == 'exp':
            return ComplexExp()
        if core is None:
            raise FormatParseError(f"curve {variant} needs a catalog name")
        if variant == 'catalog':
            return core
        return Composite(core, pre=_affine(pre_rows, pre_offset, False, 'pre'),
                         post=_affine(post_rows, post_offset, False, 'post'))
    except FormatParseError:
        raise
    except OmegaCurveError as e:
        raise FormatParseError(str(e))


def load_curve(path):
    with open(path, encoding='utf-8') as handle:
        return loads_curve(handle.read())
