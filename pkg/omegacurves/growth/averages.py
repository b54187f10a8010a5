"""Monte-Carlo energy averages over balls and spheres

All estimators draw antithetic pairs (x, 2x0 - x) in batches. Batch b of
an estimate keyed by ``key`` uses the generator get_rng(seed, *key, b), so
a value depends only on (seed, key, samples, batch_size) and never on how
joblib schedules the batches.
"""
from dataclasses import asdict, dataclass
import logging
import math

import numpy as np
from scipy.special import gamma
from scipy.spatial.distance import pdist

from omegacurves.curve.residual import opnorm
from omegacurves.errors import DegenerateInputError, DimensionMismatchError, OmegaCurveError
from omegacurves.utils.sampling import (
    Ball, antithetic_ball, antithetic_sphere, combine_batches, pair_mean_and_error, unit_directions
)
from omegacurves.utils.seeding import get_rng, run_parallel

logger = logging.getLogger(__name__)

DEFAULT_SAMPLES = 200_000
MIN_SAMPLES = 1_000
DEFAULT_BATCH = 50_000
DEFAULT_PAIRS = 2_000
DEFAULT_DIRECTIONS = 10_000
SHELL_SLACK = 1e-9


def unit_ball_volume(n):
    """ω_n = π^(n/2) / Γ(n/2 + 1)"""
    return float(math.pi ** (n / 2) / gamma(n / 2 + 1))


def _center(model, x0):
    center = np.asarray(x0, dtype=float).reshape(-1)
    if center.shape[0] != model.n:
        raise DimensionMismatchError('center dimension', model.n, center.shape[0])
    return center


def _check_radius(r):
    if not r > 0:
        raise OmegaCurveError(f"radius must be positive, got {r}")


def _batch_estimate(integrand, draw, count, seed, key):
    points = draw(get_rng(seed, *key), count)
    n = points.shape[-1]
    values = integrand(points.reshape(-1, n)).reshape(2, count)
    mean, error = pair_mean_and_error(values)
    return mean, error, count


def _monte_carlo(integrand, draw, samples, seed, key=(), batch_size=DEFAULT_BATCH, n_jobs=1):
    pairs = max(1, (int(samples) + 1) // 2)
    batch_pairs = max(1, int(batch_size) // 2)
    counts = [min(batch_pairs, pairs - start) for start in range(0, pairs, batch_pairs)]
    batches = run_parallel(
        _batch_estimate,
        [(integrand, draw, count, seed, (*key, b)) for b, count in enumerate(counts)],
        n_jobs=n_jobs,
    )
    return combine_batches(batches)


def _energy(model, p):
    return lambda X: opnorm(model.jacobian(X)) ** p


def ball_average(model, x0, r, p=None, samples=DEFAULT_SAMPLES, seed=0, key=(), batch_size=DEFAULT_BATCH, n_jobs=1):
    """Average of ‖DF‖^p over the uniform measure on B_r(x0)

    Args:
        model (CurveModel): Curve F
        x0 (array-like): Center in R^n
        r (float): Radius
        p (float): Exponent, n when omitted
        samples (int): Number of sample points (>= 1000)
        seed (int): Master seed
        key (tuple): Spawn key prefix naming this estimate
        batch_size (int): Points per batch
        n_jobs (int): joblib workers over batches

    Returns:
        tuple: (value, std_error)
    """
    center = _center(model, x0)
    _check_radius(r)
    if samples < MIN_SAMPLES:
        raise OmegaCurveError(f"ball averages need at least {MIN_SAMPLES} samples, got {samples}")
    p = model.n if p is None else p
    draw = lambda rng, count: antithetic_ball(rng, center, r, count)
    return _monte_carlo(_energy(model, p), draw, samples, seed, key, batch_size, n_jobs)


def sphere_average(model, x0, r, p=None, samples=DEFAULT_SAMPLES, seed=0, key=(), batch_size=DEFAULT_BATCH, n_jobs=1):
    """Average of ‖DF‖^p over the uniform measure on the sphere |x - x0| = r

    Returns:
        tuple: (value, std_error)
    """
    center = _center(model, x0)
    _check_radius(r)
    p = model.n if p is None else p
    draw = lambda rng, count: antithetic_sphere(rng, center, r, count)
    return _monte_carlo(_energy(model, p), draw, samples, seed, key, batch_size, n_jobs)


def h_prime(model, x0, r, samples=DEFAULT_SAMPLES, seed=0, key=(), batch_size=DEFAULT_BATCH, n_jobs=1):
    """h'(r) = (n/r) (sphere average - ball average) of ‖DF‖^n

    Returns:
        tuple: (value, std_error) with the two errors combined in quadrature
    """
    n = model.n
    ball, ball_err = ball_average(model, x0, r, n, samples, seed, (*key, 0), batch_size, n_jobs)
    sphere, sphere_err = sphere_average(model, x0, r, n, samples, seed, (*key, 1), batch_size, n_jobs)
    return n / r * (sphere - ball), n / r * math.hypot(sphere_err, ball_err)


def isoperimetric_gap(model, x0, r, samples=DEFAULT_SAMPLES, seed=0, key=(), batch_size=DEFAULT_BATCH, n_jobs=1):
    """(sphere average of ‖DF‖^(n-1))^(n/(n-1)) - ball average of ‖DF‖^n

    Nonnegative for conformal ω-curves; zero on every radius only for the
    affine ones.

    Returns:
        tuple: (gap, std_error)
    """
    n = model.n
    if n < 2:
        raise OmegaCurveError("the isoperimetric gap needs a domain of dimension n >= 2")
    exponent = n / (n - 1)
    sphere, sphere_err = sphere_average(model, x0, r, n - 1, samples, seed, (*key, 1), batch_size, n_jobs)
    ball, ball_err = ball_average(model, x0, r, n, samples, seed, (*key, 0), batch_size, n_jobs)
    lhs_err = exponent * sphere ** (exponent - 1) * sphere_err
    return sphere ** exponent - ball, math.hypot(lhs_err, ball_err)


def modulus_constant(model, x0, r, pairs=DEFAULT_PAIRS, samples=DEFAULT_SAMPLES, seed=0, batch_size=DEFAULT_BATCH):
    """Empirical constant of the modulus-of-continuity estimate

    max over sampled x, y in B_r(x0) of
    |F(x) - F(y)| / (|x - y| h(2r)^(1/n)); coincident pairs are skipped.

    Returns:
        float: The constant, nan when h(2r) vanishes
    """
    center = _center(model, x0)
    _check_radius(r)
    rng = get_rng(seed, 2)
    ball = Ball(center, r)
    X = ball.sample(rng, pairs)
    Y = ball.sample(rng, pairs)
    distance = np.linalg.norm(X - Y, axis=1)
    keep = distance > 0
    if not np.any(keep):
        raise DegenerateInputError("every sampled pair coincides")
    image_distance = np.linalg.norm(model.eval(X[keep]) - model.eval(Y[keep]), axis=1)
    h, _ = ball_average(model, center, 2 * r, model.n, samples, seed, (0,), batch_size)
    if h <= 0:
        logger.warning(f"modulus constant of {model.name} undefined at r={r:g}: energy vanishes on B_2r")
        return math.nan
    return float(np.max(image_distance / distance[keep]) / h ** (1.0 / model.n))


def image_diameter(model, x0, r, pairs=DEFAULT_PAIRS, seed=0, key=()):
    """Sampled estimate of diam F(B_r(x0)) from interior and boundary points"""
    center = _center(model, x0)
    _check_radius(r)
    rng = get_rng(seed, *key)
    inner = antithetic_ball(rng, center, r, pairs).reshape(-1, model.n)
    shell = antithetic_sphere(rng, center, r, pairs).reshape(-1, model.n)
    images = model.eval(np.concatenate([inner, shell]))
    return float(np.max(pdist(images)))


@dataclass(frozen=True)
class CaccioppoliRatio:
    """h(r)^(1/n) / (diam F(B_2r) / 2r), undefined when the diameter vanishes"""
    ratio: float
    energy: float
    energy_stderr: float
    diameter: float
    radius: float
    defined: bool


def caccioppoli_ratio(model, x0, r, samples=DEFAULT_SAMPLES, diameter_pairs=DEFAULT_PAIRS, seed=0,
                      batch_size=DEFAULT_BATCH, n_jobs=1):
    """Empirical ratio of the Caccioppoli inequality for conformal curves

    Returns:
        CaccioppoliRatio: ratio plus its ingredients
    """
    h, h_err = ball_average(model, x0, r, model.n, samples, seed, (0,), batch_size, n_jobs)
    diameter = image_diameter(model, x0, 2 * r, diameter_pairs, seed, (3,))
    defined = diameter > 0
    if not defined:
        logger.warning(f"Caccioppoli ratio of {model.name} undefined at r={r:g}: the image has zero diameter")
    ratio = h ** (1.0 / model.n) / (diameter / (2 * r)) if defined else math.nan
    return CaccioppoliRatio(
        ratio=float(ratio),
        energy=h,
        energy_stderr=h_err,
        diameter=diameter,
        radius=float(r),
        defined=bool(defined),
    )


@dataclass(frozen=True)
class MassRatio:
    """‖T‖(B_r(F(x0))) / (ω_n r^n) restricted to the truncation ball B_R(x0)"""
    ratio: float
    stderr: float
    radius: float
    truncation_radius: float
    proper_on_shell: bool
    shell_min_distance: float

    def to_dict(self):
        return asdict(self)


def mass_ratio(model, x0, r, truncation_radius, samples=DEFAULT_SAMPLES, seed=0, key=(),
               directions=DEFAULT_DIRECTIONS, batch_size=DEFAULT_BATCH, n_jobs=1):
    """Mass of the image current near F(x0) against the flat-disc mass

    Integrates ‖DF‖^n times the indicator |F(x) - F(x0)| < r over
    B_R(x0). Properness is checked on the shell |x - x0| = R: when some
    sampled shell point maps inside B_r(F(x0)) the result is flagged and
    the ratio is only a lower bound.

    Args:
        model (CurveModel): Curve F
        x0 (array-like): Center
        r (float): Target radius
        truncation_radius (float): R, the domain ball that must contain the preimage
        samples (int): Monte-Carlo points in B_R(x0)
        seed (int): Master seed
        directions (int): Shell directions for the properness check

    Returns:
        MassRatio: ratio, error and the properness flag
    """
    center = _center(model, x0)
    _check_radius(r)
    _check_radius(truncation_radius)
    R = float(truncation_radius)
    n = model.n
    origin = model.eval(center)

    shell = antithetic_sphere(get_rng(seed, *key, 4), center, R, max(1, directions // 2)).reshape(-1, n)
    shell_min = float(np.min(np.linalg.norm(model.eval(shell) - origin, axis=1)))
    proper = shell_min >= r * (1 - SHELL_SLACK)
    if not proper:
        logger.warning(
            f"{model.name} is not proper on B_{R:g}: a shell point maps to distance {shell_min:.4g} < r={r:g}; "
            "the mass ratio is a lower bound"
        )

    def integrand(X):
        inside = np.linalg.norm(model.eval(X) - origin, axis=1) < r
        return np.where(inside, opnorm(model.jacobian(X)) ** n, 0.0)

    draw = lambda rng, count: antithetic_ball(rng, center, R, count)
    mean, error = _monte_carlo(integrand, draw, samples, seed, (*key, 5), batch_size, n_jobs)
    scale = (R / r) ** n
    return MassRatio(
        ratio=scale * mean,
        stderr=scale * error,
        radius=float(r),
        truncation_radius=R,
        proper_on_shell=bool(proper),
        shell_min_distance=shell_min,
    )


def lipschitz_estimate(model, x0, r, samples=DEFAULT_PAIRS, seed=0):
    """Largest sampled ‖DF‖ on B_r(x0), boundary included"""
    center = _center(model, x0)
    _check_radius(r)
    rng = get_rng(seed, 6)
    points = np.concatenate([
        antithetic_ball(rng, center, r, samples).reshape(-1, model.n),
        center + r * unit_directions(rng, model.n, samples),
    ])
    return float(np.max(opnorm(model.jacobian(points))))
