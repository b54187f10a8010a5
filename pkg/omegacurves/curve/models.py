"""Evaluable curve models R^n -> R^m with exact Jacobians

Every model evaluates on a single point of shape (n,) or on a batch of
shape (N, n); Jacobians come back as (m, n) or (N, m, n) accordingly.
Models are immutable once built.
"""
import logging

import numpy as np
from numpy.polynomial import polynomial as P

from omegacurves.errors import DimensionMismatchError, OmegaCurveError
from omegacurves.utils.linalg import has_orthonormal_columns, random_orthonormal
from omegacurves.utils.seeding import get_rng

logger = logging.getLogger(__name__)

ISOMETRY_TOL = 1e-10
FD_STEP = 1e-5


def _as_points(x, n):
    X = np.asarray(x, dtype=float)
    single = X.ndim == 1
    if single:
        X = X[None, :]
    if X.ndim != 2 or X.shape[1] != n:
        raise DimensionMismatchError('point dimension', n, X.shape[-1] if X.ndim else 0)
    if not np.all(np.isfinite(X)):
        raise OmegaCurveError("evaluation points must be finite")
    return X, single


class CurveModel:
    """Base class of the curve catalog

    Subclasses implement ``_eval`` and ``_jacobian`` on (N, n) batches.
    """
    variant = 'abstract'

    def __init__(self, n, m, name=None):
        self.n = int(n)
        self.m = int(m)
        self.name = name or self.variant

    def eval(self, x):
        X, single = _as_points(x, self.n)
        Y = self._eval(X)
        return Y[0] if single else Y

    __call__ = eval

    def jacobian(self, x):
        X, single = _as_points(x, self.n)
        J = self._jacobian(X)
        return J[0] if single else J

    @property
    def lipschitz_constant(self):
        """Global Lipschitz bound, inf when the model has none"""
        return np.inf

    @property
    def is_one_lipschitz(self):
        return self.lipschitz_constant <= 1 + 1e-12

    @property
    def is_affine(self):
        return False

    def critical_points(self):
        """Known zeros of ||DF|| as an (k, n) array, or None when unknown"""
        return None

    def describe(self):
        return {'variant': self.variant, 'name': self.name, 'n': self.n, 'm': self.m}

    def __repr__(self):
        return f'<{type(self).__name__} {self.name}: R^{self.n} -> R^{self.m}>'


class Affine(CurveModel):
    """x -> A x + b

    Args:
        A (ndarray): m x n matrix
        b (ndarray): Offset in R^m (zero when omitted)
        isometric (bool): Claim orthonormal columns; checked on construction
    """
    variant = 'affine'

    def __init__(self, A, b=None, isometric=False, name=None):
        A = np.array(A, dtype=float, ndmin=2)
        m, n = A.shape
        b = np.zeros(m) if b is None else np.array(b, dtype=float).reshape(-1)
        if b.shape[0] != m:
            raise DimensionMismatchError('affine offset dimension', m, b.shape[0])
        if isometric and not has_orthonormal_columns(A, ISOMETRY_TOL):
            raise OmegaCurveError("affine model claims an isometric embedding but A lacks orthonormal columns")
        super().__init__(n, m, name)
        A.setflags(write=False)
        b.setflags(write=False)
        self.A = A
        self.b = b
        self.isometric = bool(isometric)

    def _eval(self, X):
        return X @ self.A.T + self.b

    def _jacobian(self, X):
        return np.broadcast_to(self.A, (X.shape[0], self.m, self.n)).copy()

    @property
    def lipschitz_constant(self):
        return float(np.linalg.norm(self.A, 2)) if self.A.size else 0.0

    @property
    def is_affine(self):
        return True

    def critical_points(self):
        if np.any(self.A):
            return np.empty((0, self.n))
        return None

    def describe(self):
        info = super().describe()
        info.update({'A': self.A.tolist(), 'b': self.b.tolist(), 'isometric': self.isometric})
        return info


class HolomorphicPolynomial(CurveModel):
    """z -> (p_1(z), ..., p_k(z)) from C into C^k, read as R^2 -> R^{2k}

    Target coordinates follow the pairing z_j = x_{2j-1} + i x_{2j}.

    Args:
        components (list): Per component, complex coefficients from the
            constant term upwards
    """
    variant = 'holomorphic'

    def __init__(self, components, name=None):
        coefficients = [np.array(c, dtype=complex).reshape(-1) for c in components]
        if not coefficients or any(c.size == 0 for c in coefficients):
            raise OmegaCurveError("a holomorphic model needs at least one non-empty coefficient list")
        super().__init__(2, 2 * len(coefficients), name)
        self.coefficients = tuple(coefficients)
        self.derivatives = tuple(P.polyder(c) if c.size > 1 else np.zeros(1, dtype=complex) for c in coefficients)

    def _complex(self, X):
        return X[:, 0] + 1j * X[:, 1]

    def _eval(self, X):
        z = self._complex(X)
        Y = np.empty((X.shape[0], self.m))
        for j, c in enumerate(self.coefficients):
            w = P.polyval(z, c)
            Y[:, 2 * j] = w.real
            Y[:, 2 * j + 1] = w.imag
        return Y

    def _jacobian(self, X):
        z = self._complex(X)
        J = np.empty((X.shape[0], self.m, 2))
        for j, d in enumerate(self.derivatives):
            w = P.polyval(z, d)
            J[:, 2 * j, 0] = w.real
            J[:, 2 * j, 1] = -w.imag
            J[:, 2 * j + 1, 0] = w.imag
            J[:, 2 * j + 1, 1] = w.real
        return J

    def critical_points(self):
        nonconstant = [np.trim_zeros(d, 'b') for d in self.derivatives]
        nonconstant = [d for d in nonconstant if d.size]
        if not nonconstant:
            return None
        if any(d.size == 1 for d in nonconstant):
            return np.empty((0, 2))
        candidates = P.polyroots(nonconstant[0])
        common = [z for z in candidates if all(abs(P.polyval(z, d)) < 1e-9 for d in nonconstant)]
        return np.array([[z.real, z.imag] for z in common]).reshape(-1, 2)

    @property
    def is_affine(self):
        return all(np.trim_zeros(c, 'b').size <= 2 for c in self.coefficients)

    @property
    def lipschitz_constant(self):
        if not self.is_affine:
            return np.inf
        slopes = np.array([d[0] for d in self.derivatives])
        return float(np.sqrt(np.sum(np.abs(slopes) ** 2)))

    def describe(self):
        info = super().describe()
        info['coefficients'] = [[[float(a.real), float(a.imag)] for a in c] for c in self.coefficients]
        return info


class ComplexExp(CurveModel):
    """z -> e^z as a map R^2 -> R^2"""
    variant = 'exp'

    def __init__(self, name=None):
        super().__init__(2, 2, name or 'exp')

    def _eval(self, X):
        scale = np.exp(X[:, 0])
        return np.stack([scale * np.cos(X[:, 1]), scale * np.sin(X[:, 1])], axis=1)

    def _jacobian(self, X):
        scale = np.exp(X[:, 0])
        a = scale * np.cos(X[:, 1])
        b = scale * np.sin(X[:, 1])
        return np.stack([np.stack([a, -b], axis=1), np.stack([b, a], axis=1)], axis=1)

    def critical_points(self):
        return np.empty((0, 2))


class Composite(CurveModel):
    """x -> post(core(pre(x)))

    Args:
        core (CurveModel): Inner model R^n -> R^{m'}
        pre (Affine): Invertible affine self-map of R^n, or None
        post (Affine): Affine map R^{m'} -> R^m, or None
    """
    variant = 'composite'

    def __init__(self, core, pre=None, post=None, name=None):
        if pre is not None:
            if pre.n != core.n or pre.m != core.n:
                raise DimensionMismatchError('pre-map shape', (core.n, core.n), (pre.m, pre.n))
            if np.linalg.matrix_rank(pre.A) < core.n:
                raise OmegaCurveError("pre-map of a composite model must be invertible")
        if post is not None and post.n != core.m:
            raise DimensionMismatchError('post-map source dimension', core.m, post.n)
        m = post.m if post is not None else core.m
        super().__init__(core.n, m, name or f'composite({core.name})')
        self.core = core
        self.pre = pre
        self.post = post

    def _eval(self, X):
        if self.pre is not None:
            X = self.pre._eval(X)
        Y = self.core._eval(X)
        if self.post is not None:
            Y = self.post._eval(Y)
        return Y

    def _jacobian(self, X):
        inner = self.pre._eval(X) if self.pre is not None else X
        J = self.core._jacobian(inner)
        if self.pre is not None:
            J = J @ self.pre.A
        if self.post is not None:
            J = self.post.A @ J
        return J

    @property
    def lipschitz_constant(self):
        constant = self.core.lipschitz_constant
        if self.pre is not None:
            constant *= self.pre.lipschitz_constant
        if self.post is not None:
            constant *= self.post.lipschitz_constant
        return constant

    @property
    def is_affine(self):
        return self.core.is_affine

    def critical_points(self):
        inner = self.core.critical_points()
        if inner is None or (self.post is not None and np.linalg.matrix_rank(self.post.A) < self.core.m):
            return None
        if self.pre is None or not len(inner):
            return inner
        return np.linalg.solve(self.pre.A, (inner - self.pre.b).T).T

    def describe(self):
        info = super().describe()
        info['core'] = self.core.describe()
        if self.pre is not None:
            info['pre'] = self.pre.describe()
        if self.post is not None:
            info['post'] = self.post.describe()
        return info


def finite_difference_jacobian(model, x, h=FD_STEP):
    """Central-difference Jacobian, for cross-validation of the analytic one"""
    X, single = _as_points(x, model.n)
    J = np.empty((X.shape[0], model.m, model.n))
    for k in range(model.n):
        step = np.zeros(model.n)
        step[k] = h
        J[:, :, k] = (model._eval(X + step) - model._eval(X - step)) / (2 * h)
    return J[0] if single else J


# Catalog --------------------------------------------------------------------

def identity(n):
    return Affine(np.eye(n), isometric=True, name=f'identity:{n}')


def zpower(k):
    if k < 1:
        raise OmegaCurveError(f"zpower needs k >= 1, got {k}")
    return HolomorphicPolynomial([[0] * k + [1]], name=f'zpower:{k}')


def zsquare():
    return HolomorphicPolynomial([[0, 0, 1]], name='zsquare')


def zcube():
    return HolomorphicPolynomial([[0, 0, 0, 1]], name='zcube')


def complex_exp():
    return ComplexExp()


def diagonal(*entries):
    return Affine(np.diag(entries), name='diag:' + ','.join(f'{e:g}' for e in entries))


def isometry(n, m, seed=0):
    """Random affine isometric embedding R^n -> R^m (orthonormal columns, random offset)"""
    if m < n:
        raise OmegaCurveError(f"an isometric embedding needs m >= n, got n={n}, m={m}")
    rng = get_rng(seed)
    A = random_orthonormal(rng, m, n)
    return Affine(A, rng.standard_normal(m), isometric=True, name=f'isometry:{n},{m},{seed}')


def constant(n, m, value=0.0):
    return Affine(np.zeros((m, n)), np.full(m, float(value)), name=f'constant:{n},{m}')


def holomorphic_embedding(*components):
    """Embed a tuple of complex polynomials C -> C^k componentwise"""
    return HolomorphicPolynomial(components, name='holomorphic')


def scaled(model, factor):
    """The model F / factor"""
    factor = float(factor)
    if factor == 0:
        raise OmegaCurveError("cannot scale a model by 1/0")
    return Composite(model, post=Affine(np.eye(model.m) / factor), name=f'{model.name}/{factor:g}')


def precompose(model, A, b=None):
    """x -> F(A x + b) for an invertible affine self-map of R^n"""
    return Composite(model, pre=Affine(A, b), name=f'{model.name}∘affine')


def postcompose(model, A, b=None):
    """x -> A F(x) + b"""
    return Composite(model, post=Affine(A, b), name=f'affine∘{model.name}')


CURVES = {
    'identity': identity,
    'zsquare': zsquare,
    'zcube': zcube,
    'zpower': zpower,
    'exp': complex_exp,
    'diag': diagonal,
    'isometry': isometry,
    'constant': constant,
}

INTEGER_PARAMS = {
    'identity': (0,),
    'zpower': (0,),
    'isometry': (0, 1, 2),
    'constant': (0, 1),
}


def curve_catalog(name, *params):
    """Build a catalog curve by name"""
    if name not in CURVES:
        raise OmegaCurveError(f"unknown curve '{name}'; choose from {', '.join(sorted(CURVES))}")
    try:
        return CURVES[name](*params)
    except TypeError:
        raise OmegaCurveError(f"wrong parameters for curve '{name}': {params}")


def parse_curve_name(text):
    """Parse 'name:arg1,arg2' into a catalog curve, e.g. 'identity:3' or 'isometry:2,4,1'"""
    name, _, args = text.partition(':')
    name = name.strip()
    params = []
    for position, token in enumerate(a.strip() for a in args.split(',') if a.strip()):
        try:
            params.append(int(token) if position in INTEGER_PARAMS.get(name, ()) else float(token))
        except ValueError:
            raise OmegaCurveError(f"invalid parameter '{token}' in curve name '{text}'")
    return curve_catalog(name, *params)
