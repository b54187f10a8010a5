"""Catalog of standard constant-coefficient calibrations

Conventions (all forms have comass one):

* ``volume(n)``              dx_1 ∧ ... ∧ dx_n, optionally inside R^m with m >= n
* ``symplectic(d)``          Σ_j dx_{2j-1} ∧ dx_{2j} on R^{2d}
* ``kahler_power(d, k)``     symplectic(d)^k / k! on R^{2d}
* ``special_lagrangian(n, θ)``  Re(e^{-iθ} dz_1 ∧ ... ∧ dz_n) on R^{2n},
  with the pairing z_j = x_{2j-1} + i x_{2j}
* ``associative``            e123 + e145 + e167 + e246 - e257 - e347 - e356 on R^7
* ``cayley``                 dx_1 ∧ φ(x_2, ..., x_8) + ⋆φ on R^8, φ the associative form
"""
from itertools import product
from math import cos, factorial, pi

from omegacurves.errors import OmegaCurveError
from omegacurves.exterior import AlternatingForm, wedge, hodge_star

ASSOCIATIVE_TERMS = {
    (1, 2, 3): 1.0,
    (1, 4, 5): 1.0,
    (1, 6, 7): 1.0,
    (2, 4, 6): 1.0,
    (2, 5, 7): -1.0,
    (3, 4, 7): -1.0,
    (3, 5, 6): -1.0,
}


def volume(n, ambient=None):
    ambient = n if ambient is None else ambient
    if not 1 <= n <= ambient:
        raise OmegaCurveError(f"volume form needs 1 <= n <= ambient, got n={n}, ambient={ambient}")
    return AlternatingForm(n, ambient, {tuple(range(1, n + 1)): 1.0})


def symplectic(d):
    if d < 1:
        raise OmegaCurveError(f"symplectic form needs d >= 1, got {d}")
    return AlternatingForm(2, 2 * d, {(2 * j - 1, 2 * j): 1.0 for j in range(1, d + 1)})


def kahler_power(d, k):
    if not 1 <= k <= d:
        raise OmegaCurveError(f"kahler_power needs 1 <= k <= d, got d={d}, k={k}")
    base = symplectic(d)
    power = base
    for _ in range(k - 1):
        power = wedge(power, base)
    return power / factorial(k)


def special_lagrangian(n, theta=0.0):
    """Re(e^{-iθ} dz_1 ∧ ... ∧ dz_n)

    Expanding dz_j = dx_{2j-1} + i dx_{2j}, a term taking the imaginary
    factor in s positions carries i^s, so its real coefficient after the
    phase is cos(sπ/2 - θ).
    """
    if n < 1:
        raise OmegaCurveError(f"special_lagrangian needs n >= 1, got {n}")
    terms = {}
    for choice in product((0, 1), repeat=n):
        axes = tuple(2 * j + 1 + c for j, c in enumerate(choice))
        coefficient = cos(sum(choice) * pi / 2 - theta)
        if abs(coefficient) > 1e-15:
            terms[axes] = coefficient
    return AlternatingForm(n, 2 * n, terms)


def associative():
    return AlternatingForm(3, 7, ASSOCIATIVE_TERMS)


def cayley():
    phi = AlternatingForm(3, 8, {tuple(a + 1 for a in axes): c for axes, c in ASSOCIATIVE_TERMS.items()})
    dx1 = AlternatingForm(1, 8, {(1,): 1.0})
    phi7 = associative()
    # ⋆ on R^7 = span(e_2..e_8), shifted into R^8
    psi = hodge_star(phi7)
    psi8 = AlternatingForm(4, 8, {tuple(a + 1 for a in index.axes): c for index, c in psi.items()})
    return wedge(dx1, phi) + psi8


CATALOG = {
    'volume': volume,
    'symplectic': symplectic,
    'kahler_power': kahler_power,
    'special_lagrangian': special_lagrangian,
    'associative': associative,
    'cayley': cayley,
}

ALIASES = {
    'vol': 'volume',
    'sym': 'symplectic',
    'kahler': 'kahler_power',
    'slag': 'special_lagrangian',
}

INTEGER_PARAMS = {
    'volume': (0, 1),
    'symplectic': (0,),
    'kahler_power': (0, 1),
    'special_lagrangian': (0,),
}


def catalog(name, *params):
    """Build a catalog calibration by name

    Args:
        name (str): One of the CATALOG keys (or an alias)
        *params: Dimension / phase parameters of that entry

    Returns:
        AlternatingForm: The calibration in the documented convention
    """
    key = ALIASES.get(name, name)
    if key not in CATALOG:
        raise OmegaCurveError(f"unknown calibration '{name}'; choose from {', '.join(sorted(CATALOG))}")
    try:
        return CATALOG[key](*params)
    except TypeError:
        raise OmegaCurveError(f"wrong parameters for calibration '{name}': {params}")


def parse_form_name(text):
    """Parse 'name:arg1,arg2' into a catalog form, e.g. 'symplectic:2' or 'slag:3,0.5'"""
    name, _, args = text.partition(':')
    key = ALIASES.get(name.strip(), name.strip())
    params = []
    for position, token in enumerate(a.strip() for a in args.split(',') if a.strip()):
        try:
            if position in INTEGER_PARAMS.get(key, ()):
                params.append(int(token))
            else:
                params.append(float(token))
        except ValueError:
            raise OmegaCurveError(f"invalid parameter '{token}' in form name '{text}'")
    return catalog(key, *params)
