"""Exception hierarchy shared by the numerical modules and the CLI"""


class OmegaCurveError(Exception):
    """Base class for every error raised by omegacurves"""


class DimensionMismatchError(OmegaCurveError):
    """Two objects disagree on a dimension

    Args:
        what (str): Which dimension is being compared
        expected: Dimension required by the first operand
        actual: Dimension carried by the second operand
    """

    def __init__(self, what, expected, actual):
        self.what = what
        self.expected = expected
        self.actual = actual
        super().__init__(f"{what} mismatch: expected {expected}, got {actual}")


class FormatParseError(OmegaCurveError):
    """A text file (form or curve spec) could not be parsed"""

    def __init__(self, message, line_no=None, line=None):
        self.line_no = line_no
        self.line = line
        if line_no is not None:
            message = f"line {line_no}: {message} ({line.strip()!r})"
        super().__init__(message)


class DegenerateInputError(OmegaCurveError):
    """Input is valid in type but degenerate for the requested operation"""


class ProfileError(OmegaCurveError):
    """An energy profile cannot support the requested analysis"""


class ConfigurationError(OmegaCurveError):
    """A run configuration is invalid"""
