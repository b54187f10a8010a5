"""Constant-coefficient exterior algebra on R^m

Forms are stored sparsely, keyed by strictly increasing multi-indices with
1-based axes (dx_1 ∧ dx_3 is the key (1, 3)). Every value is immutable and
every operation is pure.
"""
from itertools import combinations
import logging

import numpy as np

from omegacurves.errors import DimensionMismatchError, OmegaCurveError
from omegacurves.utils.linalg import det, has_orthonormal_columns

logger = logging.getLogger(__name__)

ALGEBRA_TOL = 1e-9


def merge_sign(left, right):
    """Sign of the permutation sorting the concatenation left + right

    Both inputs must be strictly increasing and disjoint.
    """
    inversions = 0
    for i in left:
        for j in right:
            if i > j:
                inversions += 1
    return -1 if inversions % 2 else 1


class MultiIndex:
    """Strictly increasing tuple of axes in 1..ambient

    The empty index (degree 0) only appears as the key of scalar forms.
    """
    __slots__ = ('axes', 'ambient')

    def __init__(self, axes, ambient):
        axes = tuple(int(a) for a in axes)
        ambient = int(ambient)
        if ambient < 1:
            raise OmegaCurveError(f"ambient dimension must be positive, got {ambient}")
        if len(axes) > ambient:
            raise OmegaCurveError(f"degree {len(axes)} exceeds ambient dimension {ambient}")
        for a in axes:
            if not 1 <= a <= ambient:
                raise OmegaCurveError(f"axis {a} out of range 1..{ambient}")
        if any(a >= b for a, b in zip(axes, axes[1:])):
            raise OmegaCurveError(f"axes {axes} are not strictly increasing")
        object.__setattr__(self, 'axes', axes)
        object.__setattr__(self, 'ambient', ambient)

    def __setattr__(self, name, value):
        raise AttributeError("MultiIndex is immutable")

    @property
    def degree(self):
        return len(self.axes)

    @property
    def zero_based(self):
        return tuple(a - 1 for a in self.axes)

    def complement(self):
        """Axes of 1..ambient not in this index, in increasing order"""
        present = set(self.axes)
        return MultiIndex([a for a in range(1, self.ambient + 1) if a not in present], self.ambient)

    def __eq__(self, other):
        return isinstance(other, MultiIndex) and self.axes == other.axes and self.ambient == other.ambient

    def __hash__(self):
        return hash((self.axes, self.ambient))

    def __lt__(self, other):
        return (self.degree, self.axes) < (other.degree, other.axes)

    def __repr__(self):
        return f'<MultiIndex {self.axes} in R^{self.ambient}>'


class AlternatingForm:
    """Constant-coefficient form of degree n on R^m

    Args:
        degree (int): Degree n of the form
        ambient (int): Ambient dimension m
        coefficients (dict): Map from axes tuples or MultiIndex to scalars;
            absent keys mean zero
        flag (str): Optional note attached to degenerate results
    """

    def __init__(self, degree, ambient, coefficients=None, flag=None):
        self.degree = int(degree)
        self.ambient = int(ambient)
        self.flag = flag
        if self.degree < 0:
            raise OmegaCurveError(f"degree must be non-negative, got {self.degree}")
        terms = {}
        for key, value in (coefficients or {}).items():
            index = key if isinstance(key, MultiIndex) else MultiIndex(key, self.ambient)
            if index.ambient != self.ambient:
                raise DimensionMismatchError('ambient dimension', self.ambient, index.ambient)
            if index.degree != self.degree:
                raise DimensionMismatchError('form degree', self.degree, index.degree)
            value = float(value)
            if not np.isfinite(value):
                raise OmegaCurveError(f"coefficient on {index.axes} is not finite")
            if value != 0.0:
                terms[index] = terms.get(index, 0.0) + value
        self._terms = {k: terms[k] for k in sorted(terms) if terms[k] != 0.0}
        self._rows = None
        self._values = None

    @classmethod
    def zero(cls, degree, ambient, flag=None):
        """The declared zero form"""
        form = cls.__new__(cls)
        form.degree = int(degree)
        form.ambient = int(ambient)
        form.flag = flag
        form._terms = {}
        form._rows = None
        form._values = None
        return form

    @classmethod
    def basis(cls, axes, ambient, coefficient=1.0):
        """coefficient * dx_{a1} ∧ ... ∧ dx_{ak} for axes in any order"""
        axes = tuple(int(a) for a in axes)
        if len(set(axes)) < len(axes):
            return cls.zero(len(axes), ambient)
        order = sorted(range(len(axes)), key=lambda i: axes[i])
        inversions = sum(1 for i in range(len(order)) for j in range(i + 1, len(order)) if order[i] > order[j])
        sign = -1.0 if inversions % 2 else 1.0
        return cls(len(axes), ambient, {tuple(sorted(axes)): sign * coefficient})

    @classmethod
    def scalar(cls, value, ambient):
        """Degree-0 form carrying a single scalar"""
        return cls(0, ambient, {(): value})

    @property
    def is_zero(self):
        return not self._terms

    @property
    def value(self):
        """Scalar value of a degree-0 form"""
        if self.degree != 0:
            raise OmegaCurveError("only degree-0 forms carry a scalar value")
        return self._terms.get(MultiIndex((), self.ambient), 0.0)

    @property
    def coefficients(self):
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def coefficient(self, axes):
        return self._terms.get(MultiIndex(axes, self.ambient), 0.0)

    def __len__(self):
        return len(self._terms)

    @property
    def l1_norm(self):
        """Sum of absolute coefficients, an upper bound for the comass"""
        return float(sum(abs(c) for c in self._terms.values()))

    def term_arrays(self):
        """Zero-based row indices (T, n) and coefficients (T,) for vectorized evaluation"""
        if self._rows is None:
            self._rows = np.array([k.zero_based for k in self._terms], dtype=int).reshape(len(self._terms), self.degree)
            self._values = np.array(list(self._terms.values()), dtype=float)
        return self._rows, self._values

    def _check_compatible(self, other):
        if self.ambient != other.ambient:
            raise DimensionMismatchError('ambient dimension', self.ambient, other.ambient)
        if self.degree != other.degree:
            raise DimensionMismatchError('form degree', self.degree, other.degree)

    def __add__(self, other):
        self._check_compatible(other)
        terms = dict(self._terms)
        for key, value in other.items():
            terms[key] = terms.get(key, 0.0) + value
        return AlternatingForm(self.degree, self.ambient, terms)

    def __neg__(self):
        return self * -1.0

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, scalar):
        scalar = float(scalar)
        return AlternatingForm(self.degree, self.ambient, {k: scalar * v for k, v in self._terms.items()})

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        scalar = float(scalar)
        return AlternatingForm(self.degree, self.ambient, {k: v / scalar for k, v in self._terms.items()})

    def allclose(self, other, tol=ALGEBRA_TOL):
        """Componentwise comparison within tol"""
        if self.degree != other.degree or self.ambient != other.ambient:
            return False
        keys = set(self._terms) | set(other._terms)
        return all(abs(self._terms.get(k, 0.0) - other._terms.get(k, 0.0)) <= tol for k in keys)

    def __eq__(self, other):
        return (
            isinstance(other, AlternatingForm)
            and self.degree == other.degree
            and self.ambient == other.ambient
            and self._terms == other._terms
        )

    def __hash__(self):
        return hash((self.degree, self.ambient, tuple(self._terms.items())))

    def __repr__(self):
        if self.is_zero:
            return f'<AlternatingForm 0 of degree {self.degree} on R^{self.ambient}>'
        parts = [f"{c:+g} dx{''.join(str(a) for a in k.axes)}" for k, c in self._terms.items()]
        return f"<AlternatingForm {' '.join(parts)} on R^{self.ambient}>"


class Frame:
    """Ordered n-tuple of vectors in R^m, stored as the columns of an m x n matrix"""

    def __init__(self, vectors):
        matrix = np.array([np.asarray(v, dtype=float) for v in vectors], dtype=float).T
        if matrix.ndim != 2:
            raise OmegaCurveError("frame vectors must share one ambient dimension")
        self._init_matrix(matrix)

    @classmethod
    def from_matrix(cls, matrix):
        frame = cls.__new__(cls)
        frame._init_matrix(np.array(matrix, dtype=float))
        return frame

    def _init_matrix(self, matrix):
        if not np.all(np.isfinite(matrix)):
            raise OmegaCurveError("frame vectors must be finite")
        matrix.setflags(write=False)
        self.matrix = matrix

    @property
    def ambient(self):
        return self.matrix.shape[0]

    @property
    def size(self):
        return self.matrix.shape[1]

    @property
    def vectors(self):
        return tuple(self.matrix[:, j] for j in range(self.size))

    def is_orthonormal(self, tol=1e-10):
        return has_orthonormal_columns(self.matrix, tol)

    def __repr__(self):
        return f'<Frame {self.size} vectors in R^{self.ambient}>'


def as_jacobian(J, rows=None, cols=None):
    """Validate an (…, m, n) Jacobian array and return it as floats"""
    J = np.asarray(J, dtype=float)
    if J.ndim < 2:
        raise OmegaCurveError(f"a Jacobian needs at least two axes, got shape {J.shape}")
    if rows is not None and J.shape[-2] != rows:
        raise DimensionMismatchError('Jacobian rows', rows, J.shape[-2])
    if cols is not None and J.shape[-1] != cols:
        raise DimensionMismatchError('Jacobian columns', cols, J.shape[-1])
    if not np.all(np.isfinite(J)):
        raise OmegaCurveError("Jacobian entries must be finite")
    return J


def wedge(a, b):
    """Wedge product a ∧ b

    Args:
        a (AlternatingForm): Form of degree p
        b (AlternatingForm): Form of degree q on the same R^m

    Returns:
        AlternatingForm: Degree p+q form; the flagged zero form when p+q > m
    """
    if a.ambient != b.ambient:
        raise DimensionMismatchError('ambient dimension', a.ambient, b.ambient)
    degree = a.degree + b.degree
    if degree > a.ambient:
        logger.warning(f"wedge of degrees {a.degree}+{b.degree} exceeds ambient dimension {a.ambient}")
        return AlternatingForm.zero(degree, a.ambient, flag='degree exceeds ambient dimension')
    terms = {}
    for I, ca in a.items():
        for J, cb in b.items():
            if set(I.axes) & set(J.axes):
                continue
            key = tuple(sorted(I.axes + J.axes))
            terms[key] = terms.get(key, 0.0) + merge_sign(I.axes, J.axes) * ca * cb
    return AlternatingForm(degree, a.ambient, terms)


def hodge_star(a):
    """Hodge star for the Euclidean metric and standard orientation

    ⋆(dx_I) = sign(I, Iᶜ) dx_{Iᶜ}; a top form maps to a degree-0 form.
    """
    d = a.ambient
    if a.is_zero:
        return AlternatingForm.zero(d - a.degree, d)
    terms = {}
    for I, c in a.items():
        complement = I.complement()
        terms[complement] = merge_sign(I.axes, complement.axes) * c
    return AlternatingForm(d - a.degree, d, terms)


def _minor_sum(form, M):
    """Σ_I ω_I det(M[I, :]) for M of shape (..., m, n)"""
    rows, values = form.term_arrays()
    if M.ndim == 2:
        if not len(values):
            return 0.0
        return float(det(M[rows, :]) @ values)
    total = np.zeros(M.shape[:-2])
    for I, c in zip(rows, values):
        total += c * det(M[..., I, :])
    return total


def evaluate(form, frame):
    """ω(v_1 ∧ ... ∧ v_n) for a frame of n vectors in R^m

    Args:
        form (AlternatingForm): Degree-n form on R^m
        frame (Frame | ndarray): Frame, or an (…, m, n) array of frame columns

    Returns:
        float or ndarray: Σ_I ω_I det(M_I)
    """
    M = frame.matrix if isinstance(frame, Frame) else np.asarray(frame, dtype=float)
    if M.shape[-2] != form.ambient:
        raise DimensionMismatchError('frame ambient dimension', form.ambient, M.shape[-2])
    if M.shape[-1] != form.degree:
        raise DimensionMismatchError('frame size', form.degree, M.shape[-1])
    return _minor_sum(form, M)


def pullback_top(form, J):
    """⋆F*ω at a point, given the m x n Jacobian of F there

    Args:
        form (AlternatingForm): Degree-n form on R^m
        J (ndarray): Jacobian of shape (m, n) or a stack (..., m, n)

    Returns:
        float or ndarray: Σ_I ω_I det(J_I)
    """
    J = as_jacobian(J, rows=form.ambient, cols=form.degree)
    return _minor_sum(form, J)


def pullback_linear(form, A):
    """Pullback of a constant form through the linear map x -> A x

    Args:
        form (AlternatingForm): Degree-n form on R^m
        A (ndarray): Matrix of shape (m, k)

    Returns:
        AlternatingForm: Degree-n form on R^k with coefficients Σ_I ω_I det(A[I, J])
    """
    A = as_jacobian(A, rows=form.ambient)
    k = A.shape[1]
    if form.degree > k:
        return AlternatingForm.zero(form.degree, k, flag='degree exceeds source dimension')
    terms = {}
    for J in combinations(range(k), form.degree):
        value = _minor_sum(form, A[:, list(J)])
        if value != 0.0:
            terms[tuple(j + 1 for j in J)] = value
    return AlternatingForm(form.degree, k, terms)
