"""Inner and outer radii sandwiching the preimage of a target ball

For a target radius r around F(x0) the search brackets
    s_r: the largest s with sup_{|x-x0|=s} |F(x) - F(x0)| < r
    S_r: the smallest S with inf_{|x-x0|=t} |F(x) - F(x0)| >= r for t in [S, cap]
by doubling and bisection. Sphere extrema come from sampled directions
plus a short local refinement around the best candidates.
"""
from dataclasses import dataclass
import logging
import math

import numpy as np

from omegacurves.errors import DimensionMismatchError, OmegaCurveError
from omegacurves.utils.sampling import antithetic_sphere, unit_directions
from omegacurves.utils.seeding import get_rng

logger = logging.getLogger(__name__)

DEFAULT_RESOLUTION = 1e-3
DEFAULT_MAX_RADIUS = 1e3
DEFAULT_DIRECTIONS = 10_000
REFINE_STEPS = 3
REFINE_CANDIDATES = 4
REFINE_TRIALS = 8
VERIFY_SHELLS = 16


@dataclass(frozen=True)
class PropernessRadii:
    """s_r and S_r with the search resolution as certified uncertainty

    An infinite value means the search cap was reached; ``inner_capped`` or
    ``outer_capped`` is then set and the value reads as ">= max_radius".
    """
    r: float
    s_r: float
    S_r: float
    resolution: float
    max_radius: float
    inner_capped: bool
    outer_capped: bool
    outer_verified: bool
    directions: int
    seed: int

    @property
    def ordered(self):
        if math.isinf(self.s_r) or math.isinf(self.S_r):
            return True
        return self.s_r <= self.S_r + self.resolution

    def describe_radius(self, value):
        return f'>= {self.max_radius:g}' if math.isinf(value) else value

    def to_dict(self):
        return {
            'r': self.r,
            's_r': self.describe_radius(self.s_r),
            'S_r': self.describe_radius(self.S_r),
            'resolution': self.resolution,
            'max_radius': self.max_radius,
            'inner_capped': self.inner_capped,
            'outer_capped': self.outer_capped,
            'outer_verified': self.outer_verified,
            'directions': self.directions,
            'seed': self.seed,
        }


class _SphereSampler:
    """Sampled extrema of |F(x0 + s d) - F(x0)| over unit directions d"""

    def __init__(self, model, center, directions, seed):
        self.model = model
        self.center = center
        self.origin = model.eval(center)
        self.rng = get_rng(seed, 9)
        self.directions = antithetic_sphere(self.rng, np.zeros(model.n), 1.0, max(1, directions // 2)).reshape(-1, model.n)
        self.spacing = float(self.directions.shape[0]) ** (-1.0 / max(1, model.n - 1))

    def _distances(self, s, D):
        return np.linalg.norm(self.model.eval(self.center + s * D) - self.origin, axis=1)

    def extreme(self, s, maximize):
        """Largest (or smallest) distance on the sphere of radius s"""
        sign = 1.0 if maximize else -1.0
        values = sign * self._distances(s, self.directions)
        order = np.argsort(values)[-REFINE_CANDIDATES:]
        best_dirs = self.directions[order]
        best_vals = values[order]
        scale = self.spacing
        for _ in range(REFINE_STEPS):
            for i in range(best_dirs.shape[0]):
                trial = best_dirs[i] + scale * self.rng.standard_normal((REFINE_TRIALS, self.model.n))
                trial /= np.linalg.norm(trial, axis=1)[:, None]
                trial_vals = sign * self._distances(s, trial)
                k = int(np.argmax(trial_vals))
                if trial_vals[k] > best_vals[i]:
                    best_vals[i] = trial_vals[k]
                    best_dirs[i] = trial[k]
            scale /= 2
        return sign * float(best_vals.max())


def _bracket(predicate, start, resolution, max_radius):
    """(lo, hi) with predicate false at lo and true at hi, hi - lo <= resolution

    Returns (lo, inf) when the predicate stays false up to max_radius.
    """
    lo, hi = 0.0, min(start, max_radius)
    if predicate(hi):
        while hi > resolution:
            mid = hi / 2
            if predicate(mid):
                hi = mid
            else:
                lo = mid
                break
        if hi <= resolution and lo == 0.0:
            return 0.0, hi
    else:
        lo = hi
        while True:
            if lo >= max_radius:
                return lo, math.inf
            hi = min(2 * lo, max_radius)
            if predicate(hi):
                break
            lo = hi
    while hi - lo > resolution:
        mid = (lo + hi) / 2
        if predicate(mid):
            hi = mid
        else:
            lo = mid
    return lo, hi


def properness_radii(model, x0, r, resolution=DEFAULT_RESOLUTION, max_radius=DEFAULT_MAX_RADIUS,
                     directions=DEFAULT_DIRECTIONS, seed=0):
    """Inner and outer properness radii of F around x0 for target radius r

    Args:
        model (CurveModel): Curve F
        x0 (array-like): Center
        r (float): Target radius
        resolution (float): Bisection resolution, reported as uncertainty
        max_radius (float): Search cap
        directions (int): Sampled directions per sphere
        seed (int): Master seed

    Returns:
        PropernessRadii: Radii and cap flags
    """
    if not r > 0:
        raise OmegaCurveError(f"target radius must be positive, got {r}")
    if not 0 < resolution < max_radius:
        raise OmegaCurveError(f"need 0 < resolution < max_radius, got {resolution}, {max_radius}")
    center = np.asarray(x0, dtype=float).reshape(-1)
    if center.shape[0] != model.n:
        raise DimensionMismatchError('center dimension', model.n, center.shape[0])
    sampler = _SphereSampler(model, center, directions, seed)

    reach_lo, reach_hi = _bracket(lambda s: sampler.extreme(s, True) >= r, r, resolution, max_radius)
    clear_lo, clear_hi = _bracket(lambda s: sampler.extreme(s, False) >= r, r, resolution, max_radius)
    inner_capped = math.isinf(reach_hi)
    outer_capped = math.isinf(clear_hi)
    s_r = math.inf if inner_capped else reach_lo
    S_r = math.inf if outer_capped else clear_hi

    verified = not outer_capped
    if verified and S_r < max_radius:
        for t in np.geomspace(S_r, max_radius, VERIFY_SHELLS)[1:]:
            if sampler.extreme(t, False) < r:
                verified = False
                logger.warning(f"{model.name}: shell |x - x0| = {t:.4g} maps inside B_{r:g}(F(x0)) beyond S_r = {S_r:.4g}")
                break
    if inner_capped or outer_capped:
        logger.warning(f"properness search for {model.name} hit the cap {max_radius:g} at r={r:g}")
    return PropernessRadii(
        r=float(r),
        s_r=float(s_r),
        S_r=float(S_r),
        resolution=float(resolution),
        max_radius=float(max_radius),
        inner_capped=inner_capped,
        outer_capped=outer_capped,
        outer_verified=verified,
        directions=int(directions),
        seed=int(seed),
    )


def properness_table(model, x0, radii, **kwargs):
    """properness_radii over several target radii"""
    return [properness_radii(model, x0, r, **kwargs) for r in radii]
