"""Energy profiles h(r) over radius grids and the growth dichotomy classifier"""
from dataclasses import dataclass, field
import logging
import math

import numpy as np
import pandas as pd

from omegacurves.errors import DimensionMismatchError, OmegaCurveError, ProfileError
from omegacurves.growth.averages import (
    DEFAULT_BATCH, DEFAULT_PAIRS, DEFAULT_SAMPLES, ball_average, image_diameter, mass_ratio, sphere_average
)
from omegacurves.utils.sampling import Ball
from omegacurves.utils.seeding import get_rng, run_parallel

logger = logging.getLogger(__name__)

GROWTH_DELTA = 0.05
AFFINITY_TOL = 1e-6
AFFINITY_SAMPLES = 2_000
MIN_SPAN = 8.0
# relative slack for deterministic (zero-error) profiles
MONOTONE_SLACK = 1e-12

AFFINE_BOUNDED = 'AffineBounded'
SUPER_EUCLIDEAN = 'SuperEuclidean'
INCONCLUSIVE = 'Inconclusive'


def geometric_radii(start, factor, count):
    """start * factor**j for j < count, e.g. (1, 2, 5) -> 1, 2, 4, 8, 16"""
    if not start > 0 or not factor > 1 or count < 1:
        raise OmegaCurveError(f"invalid geometric grid start={start} factor={factor} count={count}")
    return start * float(factor) ** np.arange(int(count))


def _check_radii(radii):
    radii = np.asarray(radii, dtype=float).reshape(-1)
    if radii.size == 0 or np.any(radii <= 0) or np.any(np.diff(radii) <= 0):
        raise ProfileError(f"radii must be positive and strictly increasing, got {radii.tolist()}")
    return radii


def monotonicity_margin(values, errors):
    """min_j of h_{j+1} - h_j + 3 * combined std error; >= 0 means non-decreasing"""
    values = np.asarray(values, dtype=float)
    errors = np.asarray(errors, dtype=float)
    if values.size < 2:
        return math.inf
    combined = np.hypot(errors[1:], errors[:-1])
    slack = MONOTONE_SLACK * np.maximum(np.abs(values[1:]), np.abs(values[:-1]))
    return float(np.min(np.diff(values) + 3 * combined + slack))


@dataclass(frozen=True)
class EnergyProfile:
    """Ball averages h(r) and sphere averages of ‖DF‖^p around a center"""
    center: tuple
    radii: np.ndarray = field(repr=False)
    h_values: np.ndarray = field(repr=False)
    h_errors: np.ndarray = field(repr=False)
    sphere_values: dict = field(repr=False)
    sphere_errors: dict = field(repr=False)
    samples: int
    seed: int
    dimension: int

    @property
    def monotonicity_margin(self):
        return monotonicity_margin(self.h_values, self.h_errors)

    @property
    def is_monotone(self):
        return self.monotonicity_margin >= 0

    def to_frame(self):
        """Table with columns r, h, h_stderr, sphere_<p>, sphere_<p>_stderr"""
        frame = pd.DataFrame({'r': self.radii, 'h': self.h_values, 'h_stderr': self.h_errors})
        for p in sorted(self.sphere_values):
            label = f'{p:g}'
            frame[f'sphere_{label}'] = self.sphere_values[p]
            frame[f'sphere_{label}_stderr'] = self.sphere_errors[p]
        return frame

    def metadata(self):
        return {
            'center': list(self.center),
            'samples': self.samples,
            'seed': self.seed,
            'dimension': self.dimension,
            'monotone': bool(self.is_monotone),
            'monotonicity_margin': self.monotonicity_margin,
        }


def _profile_entry(model, center, r, index, exponents, samples, seed, batch_size):
    ball = ball_average(model, center, r, model.n, samples, seed, (index, 0), batch_size)
    spheres = [
        sphere_average(model, center, r, p, samples, seed, (index, k + 1), batch_size)
        for k, p in enumerate(exponents)
    ]
    return ball, spheres


def energy_profile(model, x0, radii, sphere_exponents=None, samples=DEFAULT_SAMPLES, seed=0,
                   batch_size=DEFAULT_BATCH, n_jobs=1):
    """Build h(r) and sphere averages on a radius grid

    Radius j uses sub-seeds (seed, j, ...), so the profile at a radius is the
    same whether it is computed alone or as part of a larger grid.

    Args:
        model (CurveModel): Curve F
        x0 (array-like): Center
        radii (array-like): Strictly increasing positive radii
        sphere_exponents (tuple): Exponents p of the sphere averages, (n,) by default
        samples (int): Monte-Carlo points per estimate
        seed (int): Master seed
        batch_size (int): Points per batch
        n_jobs (int): joblib workers over radii

    Returns:
        EnergyProfile: The profile
    """
    radii = _check_radii(radii)
    center = np.asarray(x0, dtype=float).reshape(-1)
    if center.shape[0] != model.n:
        raise DimensionMismatchError('center dimension', model.n, center.shape[0])
    exponents = tuple(sphere_exponents) if sphere_exponents else (model.n,)
    entries = run_parallel(
        _profile_entry,
        [(model, center, r, j, exponents, samples, seed, batch_size) for j, r in enumerate(radii)],
        n_jobs=n_jobs,
    )
    profile = EnergyProfile(
        center=tuple(center.tolist()),
        radii=radii,
        h_values=np.array([e[0][0] for e in entries]),
        h_errors=np.array([e[0][1] for e in entries]),
        sphere_values={p: np.array([e[1][k][0] for e in entries]) for k, p in enumerate(exponents)},
        sphere_errors={p: np.array([e[1][k][1] for e in entries]) for k, p in enumerate(exponents)},
        samples=int(samples),
        seed=int(seed),
        dimension=model.n,
    )
    if not profile.is_monotone:
        logger.warning(f"h(r) of {model.name} decreases beyond 3 std errors (margin {profile.monotonicity_margin:.3g})")
    return profile


def doubling_ratios(radii, values):
    """Effective doubling ratios (h_{j+1}/h_j)^(log 2 / log(r_{j+1}/r_j))

    A vanishing pair h_j = h_{j+1} = 0 counts as ratio 1.
    """
    radii = np.asarray(radii, dtype=float)
    values = np.asarray(values, dtype=float)
    ratios = []
    for j in range(len(radii) - 1):
        exponent = math.log(2) / math.log(radii[j + 1] / radii[j])
        if values[j] == 0:
            ratios.append(1.0 if values[j + 1] == 0 else math.inf)
        else:
            ratios.append(float((values[j + 1] / values[j]) ** exponent))
    return np.array(ratios)


def affinity_residual(model, x0, radius, samples=AFFINITY_SAMPLES, seed=0):
    """Relative sup-deviation of F from its least-squares affine fit on B_radius(x0)

    Deviations are divided by the spread max |F(x) - mean F| of the sampled
    values, so the number is invariant under rescaling F. A constant map
    has residual 0.
    """
    ball = Ball(x0, radius)
    X = ball.sample(get_rng(seed, 7), samples)
    Y = model.eval(X)
    design = np.hstack([X - ball.center, np.ones((X.shape[0], 1))])
    coefficients, *_ = np.linalg.lstsq(design, Y, rcond=None)
    deviation = float(np.max(np.linalg.norm(Y - design @ coefficients, axis=1)))
    spread = float(np.max(np.linalg.norm(Y - Y.mean(axis=0), axis=1)))
    if spread == 0:
        return 0.0
    return deviation / spread


@dataclass(frozen=True)
class GrowthVerdict:
    label: str
    doubling_ratios: tuple
    top_ratio: float
    monotonicity_margin: float
    affinity_residual: float
    delta: float
    affinity_tol: float
    reference_radius: float

    def to_dict(self):
        return {
            'label': self.label,
            'doubling_ratios': list(self.doubling_ratios),
            'top_ratio': self.top_ratio,
            'monotonicity_margin': self.monotonicity_margin,
            'affinity_residual': self.affinity_residual,
            'delta': self.delta,
            'affinity_tol': self.affinity_tol,
            'reference_radius': self.reference_radius,
        }


def classify_growth(profile, model, delta=GROWTH_DELTA, affinity_tol=AFFINITY_TOL, samples=AFFINITY_SAMPLES):
    """Label a profile AffineBounded, SuperEuclidean or Inconclusive

    SuperEuclidean needs a doubling ratio >= 1 + delta at the top scale.
    AffineBounded needs every doubling ratio <= 1 + delta and a best-fit
    affine map within affinity_tol on the largest ball. Conformal ω-curves
    always fall in one of the two classes, so Inconclusive on a verified
    curve signals a numerical problem and is logged at WARNING.

    Args:
        profile (EnergyProfile): Profile spanning at least three doublings
        model (CurveModel): The curve the profile was built from
        delta (float): Doubling-ratio margin
        affinity_tol (float): Relative affine-fit tolerance
        samples (int): Sample points of the affine fit

    Returns:
        GrowthVerdict: Label and evidence
    """
    radii = profile.radii
    if len(radii) < 2 or radii[-1] / radii[0] < MIN_SPAN * (1 - 1e-12):
        raise ProfileError(
            f"profile spans radii {radii[0]:g}..{radii[-1]:g}; at least three doublings are required"
        )
    ratios = doubling_ratios(radii, profile.h_values)
    top = float(ratios[-1])
    residual = affinity_residual(model, profile.center, radii[-1], samples, profile.seed)
    if top >= 1 + delta:
        label = SUPER_EUCLIDEAN
    elif np.all(ratios <= 1 + delta) and residual <= affinity_tol:
        label = AFFINE_BOUNDED
    else:
        label = INCONCLUSIVE
        logger.warning(
            f"growth of {model.name} is inconclusive: top doubling ratio {top:.4g}, affinity residual {residual:.3g}"
        )
    return GrowthVerdict(
        label=label,
        doubling_ratios=tuple(float(r) for r in ratios),
        top_ratio=top,
        monotonicity_margin=profile.monotonicity_margin,
        affinity_residual=residual,
        delta=delta,
        affinity_tol=affinity_tol,
        reference_radius=float(radii[-1]),
    )


def diameter_growth(model, x0, radii, pairs=DEFAULT_PAIRS, seed=0):
    """Sampled diam F(B_r(x0)) and diam / r over a radius grid

    Super-Euclidean energy growth goes with super-linear diameter growth.

    Returns:
        DataFrame: columns r, diameter, ratio
    """
    radii = _check_radii(radii)
    diameters = np.array([image_diameter(model, x0, r, pairs, seed, (8, j)) for j, r in enumerate(radii)])
    return pd.DataFrame({'r': radii, 'diameter': diameters, 'ratio': diameters / radii})


def mass_ratio_profile(model, x0, radii, truncation_radii, samples=DEFAULT_SAMPLES, seed=0,
                       batch_size=DEFAULT_BATCH, n_jobs=1):
    """mass_ratio over a radius grid, one truncation radius per target radius

    The monotonicity formula makes the ratio non-decreasing in r.

    Returns:
        list: MassRatio per radius
    """
    radii = _check_radii(radii)
    truncation_radii = np.asarray(truncation_radii, dtype=float).reshape(-1)
    if truncation_radii.shape != radii.shape:
        raise DimensionMismatchError('truncation radii count', radii.shape[0], truncation_radii.shape[0])
    return run_parallel(
        lambda r, R, j: mass_ratio(model, x0, r, R, samples, seed, key=(j,), batch_size=batch_size),
        [(r, R, j) for j, (r, R) in enumerate(zip(radii, truncation_radii))],
        n_jobs=n_jobs,
    )
