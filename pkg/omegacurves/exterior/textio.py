"""Plain-text serialization of constant-coefficient forms

Format::

    form degree=<n> ambient=<m>
    I1 I2 ... In  c

Axes are 1-based, one coefficient per line. Coefficients are written with
``repr`` so that any float survives a round trip bit for bit. Blank lines
and ``#`` comments are ignored.
"""
import re

from omegacurves.errors import FormatParseError, OmegaCurveError
from omegacurves.exterior.algebra import AlternatingForm

HEADER = re.compile(r'^form\s+degree=(\d+)\s+ambient=(\d+)\s*$')


def dumps_form(form):
    """Serialize a form to text

    Args:
        form (AlternatingForm): Form to serialize

    Returns:
        str: Text with a header line and one line per nonzero coefficient
    """
    lines = [f'form degree={form.degree} ambient={form.ambient}']
    for index, value in form.items():
        axes = ' '.join(str(a) for a in index.axes)
        lines.append(f'{axes}  {value!r}' if axes else repr(value))
    return '\n'.join(lines) + '\n'


def loads_form(text):
    """Parse the text format back into an AlternatingForm

    Raises:
        FormatParseError: naming the offending line
    """
    header = None
    coefficients = {}
    for line_no, line in enumerate(text.splitlines(), start=1):
        content = line.split('#', 1)[0].strip()
        if not content:
            continue
        if header is None:
            match = HEADER.match(content)
            if not match:
                raise FormatParseError("expected 'form degree=<n> ambient=<m>' header", line_no, line)
            header = int(match.group(1)), int(match.group(2))
            continue
        degree, ambient = header
        tokens = content.split()
        if len(tokens) != degree + 1:
            raise FormatParseError(f"expected {degree} axes and a coefficient", line_no, line)
        try:
            axes = tuple(int(t) for t in tokens[:-1])
            value = float(tokens[-1])
        except ValueError:
            raise FormatParseError("axes must be integers and the coefficient a real number", line_no, line)
        key = tuple(sorted(axes))
        if key != axes:
            raise FormatParseError("axes must be strictly increasing", line_no, line)
        if key in coefficients:
            raise FormatParseError(f"duplicate coefficient for axes {key}", line_no, line)
        coefficients[key] = value
        try:
            AlternatingForm(degree, ambient, {key: value})
        except OmegaCurveError as e:
            raise FormatParseError(str(e), line_no, line)
    if header is None:
        raise FormatParseError("empty form file")
    return AlternatingForm(header[0], header[1], coefficients)


def dump_form(form, path):
    with open(path, 'w', encoding='utf-8') as handle:
        handle.write(dumps_form(form))


def load_form(path):
    with open(path, encoding='utf-8') as handle:
        return loads_form(handle.read())
