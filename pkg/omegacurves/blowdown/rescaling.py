"""Blow-down rescalings and their distance to linear isometries"""
from dataclasses import dataclass, field
import logging

import numpy as np

from omegacurves.curve.models import Affine, Composite
from omegacurves.errors import DegenerateInputError, DimensionMismatchError, OmegaCurveError
from omegacurves.growth.averages import DEFAULT_BATCH, ball_average, lipschitz_estimate
from omegacurves.utils.sampling import Ball
from omegacurves.utils.seeding import get_rng, run_parallel

logger = logging.getLogger(__name__)

DEFAULT_SAMPLE_POINTS = 1_000
DEFAULT_ENERGY_SAMPLES = 20_000
HYPOTHESIS_TOL = 1e-6
DECREASE_TOL = 1e-9


def rescale(model, y, r):
    """The blow-down x -> (F(y + r x) - F(y)) / r

    Affine models collapse to their linear part; every other model becomes
    a Composite with affine pre- and post-maps.

    Args:
        model (CurveModel): Curve F
        y (array-like): Anchor in R^n
        r (float): Scale > 0

    Returns:
        CurveModel: The rescaled model
    """
    if not r > 0:
        raise OmegaCurveError(f"rescaling needs r > 0, got {r}")
    y = np.asarray(y, dtype=float).reshape(-1)
    if y.shape[0] != model.n:
        raise DimensionMismatchError('anchor dimension', model.n, y.shape[0])
    name = f'{model.name}@{r:g}'
    if isinstance(model, Affine):
        return Affine(model.A, isometric=model.isometric, name=name)
    post_A = np.eye(model.m) / r
    pre = Affine(np.eye(model.n) * r, y)
    post = Affine(post_A, -(post_A @ model.eval(y)))
    return Composite(model, pre=pre, post=post, name=name)


def _check_sample(sample, n):
    X = np.asarray(sample, dtype=float)
    if X.ndim != 2 or X.shape[1] != n:
        raise DimensionMismatchError('sample point dimension', n, X.shape[-1] if X.ndim else 0)
    if X.shape[0] <= n or np.linalg.matrix_rank(X - X.mean(axis=0)) < n:
        raise DegenerateInputError(f"sample of {X.shape[0]} points does not span R^{n} affinely")
    return X


def best_fit_isometry(X, Y):
    """Linear map G with orthonormal columns best aligning X G^T with Y

    Polar factor of the cross-covariance Y^T X. For square G the
    orientation-preserving branch is taken.
    """
    U, _, Vt = np.linalg.svd(Y.T @ X, full_matrices=False)
    if U.shape[0] == Vt.shape[0] and np.linalg.det(U @ Vt) < 0:
        U[:, -1] = -U[:, -1]
    return U @ Vt


def isometry_deviation(model, sample=None, seed=0, samples=DEFAULT_SAMPLE_POINTS):
    """sup over the sample of |F(x) - G x| for the best-fit linear isometry G

    Args:
        model (CurveModel): Curve F (typically a blow-down, so F(0) = 0)
        sample (ndarray): (N, n) points spanning R^n; the closed unit ball
            is sampled when omitted
        seed (int): Seed for the default sample
        samples (int): Size of the default sample

    Returns:
        tuple: (deviation, G) with G an m x n matrix with orthonormal columns
    """
    if model.m < model.n:
        raise DimensionMismatchError('isometry target dimension (at least n)', model.n, model.m)
    if sample is None:
        sample = Ball(np.zeros(model.n), 1.0).sample(get_rng(seed, 11), samples)
    X = _check_sample(sample, model.n)
    Y = model.eval(X)
    G = best_fit_isometry(X, Y)
    deviation = float(np.max(np.linalg.norm(Y - X @ G.T, axis=1)))
    return deviation, G


@dataclass(frozen=True)
class BlowdownReport:
    """Per-scale isometry deviations of the blow-downs F_r around an anchor

    ``energy_normalized`` and ``one_lipschitz`` record whether each scale
    meets the hypotheses under which the blow-downs converge to a linear
    isometry; deviations are diagnostics when they do not.
    """
    anchor: tuple
    scales: tuple
    deviations: tuple
    energies: tuple
    energy_errors: tuple
    lipschitz: tuple
    energy_normalized: tuple
    one_lipschitz: tuple
    best_fit: np.ndarray = field(repr=False)
    seed: int = 0
    sample_points: int = DEFAULT_SAMPLE_POINTS
    samples: int = DEFAULT_ENERGY_SAMPLES

    @property
    def hypothesis_satisfied(self):
        return all(self.energy_normalized) and all(self.one_lipschitz)

    @property
    def deviations_decreasing(self):
        d = np.asarray(self.deviations)
        return bool(np.all(np.diff(d) <= DECREASE_TOL))

    def to_dict(self):
        return {
            'anchor': list(self.anchor),
            'scales': list(self.scales),
            'deviations': list(self.deviations),
            'energies': list(self.energies),
            'energy_errors': list(self.energy_errors),
            'lipschitz': list(self.lipschitz),
            'energy_normalized': list(self.energy_normalized),
            'one_lipschitz': list(self.one_lipschitz),
            'hypothesis_satisfied': self.hypothesis_satisfied,
            'deviations_decreasing': self.deviations_decreasing,
            'best_fit': self.best_fit.tolist(),
            'seed': self.seed,
            'sample_points': self.sample_points,
            'samples': self.samples,
        }


def _scale_entry(model, anchor, r, index, sample, samples, seed, batch_size, tol):
    blown = rescale(model, anchor, r)
    deviation, G = isometry_deviation(blown, sample)
    origin = np.zeros(model.n)
    energy, error = ball_average(blown, origin, 1.0, model.n, samples, seed, (12, index), batch_size)
    lipschitz = lipschitz_estimate(blown, origin, 1.0, seed=seed)
    normalized = abs(energy - 1) <= tol + 3 * error
    return deviation, G, energy, error, lipschitz, normalized, lipschitz <= 1 + tol


def blowdown_report(model, y, scales, sample_points=DEFAULT_SAMPLE_POINTS, samples=DEFAULT_ENERGY_SAMPLES, seed=0,
                    tol=HYPOTHESIS_TOL, batch_size=DEFAULT_BATCH, n_jobs=1):
    """Run the blow-down diagnostics over increasing scales

    Every scale is measured on the same sample of the closed unit ball.

    Args:
        model (CurveModel): Curve F
        y (array-like): Anchor
        scales (array-like): Strictly increasing scales r_j
        sample_points (int): Points of the deviation sample
        samples (int): Monte-Carlo points of the energy average on B_1
        seed (int): Master seed
        tol (float): Tolerance of the normalized-energy and Lipschitz checks
        n_jobs (int): joblib workers over scales

    Returns:
        BlowdownReport: Deviations, energies and hypothesis flags per scale
    """
    scales = np.asarray(scales, dtype=float).reshape(-1)
    if scales.size == 0 or np.any(scales <= 0) or np.any(np.diff(scales) <= 0):
        raise OmegaCurveError(f"scales must be positive and strictly increasing, got {scales.tolist()}")
    anchor = np.asarray(y, dtype=float).reshape(-1)
    sample = Ball(np.zeros(model.n), 1.0).sample(get_rng(seed, 11), sample_points)
    entries = run_parallel(
        _scale_entry,
        [(model, anchor, r, j, sample, samples, seed, batch_size, tol) for j, r in enumerate(scales)],
        n_jobs=n_jobs,
    )
    report = BlowdownReport(
        anchor=tuple(anchor.tolist()),
        scales=tuple(scales.tolist()),
        deviations=tuple(e[0] for e in entries),
        energies=tuple(e[2] for e in entries),
        energy_errors=tuple(e[3] for e in entries),
        lipschitz=tuple(e[4] for e in entries),
        energy_normalized=tuple(bool(e[5]) for e in entries),
        one_lipschitz=tuple(bool(e[6]) for e in entries),
        best_fit=entries[-1][1],
        seed=int(seed),
        sample_points=int(sample_points),
        samples=int(samples),
    )
    if not report.hypothesis_satisfied:
        logger.warning(
            f"blow-downs of {model.name} violate the normalized-energy or 1-Lipschitz hypothesis; "
            "deviations are diagnostics only"
        )
    return report
