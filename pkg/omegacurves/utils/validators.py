"""Validation utilities for run configurations"""
import re

OUTPUT_FORMATS = ('csv', 'json')
GRID_PATTERN = re.compile(r'^\s*([0-9.eE+-]+)\s*x\s*([0-9.eE+-]+)\s*x\s*(\d+)\s*$')


def validate_grid(text):
    """Validate a geometric grid written start x factor x count

    Args:
        text (str): Grid spec, e.g. "1x2x5"

    Returns:
        tuple: (bool, tuple | str) - (is_valid, (start, factor, count) or error_message)
    """
    match = GRID_PATTERN.match(text or '')
    if not match:
        return False, f"grid '{text}' must read start x factor x count, e.g. 1x2x5"
    try:
        start, factor = float(match.group(1)), float(match.group(2))
    except ValueError:
        return False, f"grid '{text}' has a non-numeric start or factor"
    count = int(match.group(3))
    if not start > 0:
        return False, "grid start must be positive"
    if count > 1 and not factor > 1:
        return False, "grid factor must exceed 1 so radii strictly increase"
    if count < 1:
        return False, "grid count must be at least 1"
    return True, (start, factor, count)


def validate_center(text, dimension):
    """Validate a comma-separated center point

    Args:
        text (str): e.g. "0,0" (None means the origin)
        dimension (int): Required dimension

    Returns:
        tuple: (bool, tuple | str) - (is_valid, coordinates or error_message)
    """
    if text is None or text.strip() == '':
        return True, (0.0,) * dimension
    try:
        coordinates = tuple(float(t) for t in text.split(','))
    except ValueError:
        return False, f"center '{text}' must be comma-separated numbers"
    if len(coordinates) != dimension:
        return False, f"center dimension mismatch: expected {dimension}, got {len(coordinates)}"
    return True, coordinates


def validate_format(fmt):
    """Check the output format is one of csv, json"""
    if fmt not in OUTPUT_FORMATS:
        return False, f"format must be one of {', '.join(OUTPUT_FORMATS)}, got '{fmt}'"
    return True, fmt


def validate_positive(name, value, integer=False):
    """Check a count or tolerance is positive

    Returns:
        tuple: (bool, str) - (is_valid, error_message)
    """
    if value is None:
        return False, f"{name} is required"
    if integer and int(value) != value:
        return False, f"{name} must be an integer"
    if not value > 0:
        return False, f"{name} must be positive, got {value}"
    return True, ""
