"""Uniform sampling of balls, spheres, boxes and annuli

Directions are normalized Gaussian vectors; radii inside a ball are drawn
as r * U**(1/n). Ball and sphere samplers return antithetic pairs: the
second half of the sample is the reflection of the first half through the
center.
"""
import numpy as np

from omegacurves.errors import DegenerateInputError, DimensionMismatchError


def unit_directions(rng, n, count):
    """count uniform directions on the unit sphere of R^n"""
    directions = rng.standard_normal((count, n))
    norms = np.linalg.norm(directions, axis=1)
    return directions / norms[:, None]


def antithetic_ball(rng, center, radius, pairs):
    """2 * pairs points uniform in B_radius(center), as (x, 2c - x) pairs

    Returns:
        ndarray: Shape (2, pairs, n); [0] holds the draws, [1] their reflections
    """
    center = np.asarray(center, dtype=float)
    n = center.shape[0]
    offsets = unit_directions(rng, n, pairs) * rng.random(pairs)[:, None] ** (1.0 / n)
    return np.stack([center + radius * offsets, center - radius * offsets])


def antithetic_sphere(rng, center, radius, pairs):
    """2 * pairs points uniform on the sphere of given radius, as (x, 2c - x) pairs"""
    center = np.asarray(center, dtype=float)
    offsets = unit_directions(rng, center.shape[0], pairs)
    return np.stack([center + radius * offsets, center - radius * offsets])


class Ball:
    """Closed ball B_radius(center) in R^n"""

    def __init__(self, center, radius):
        self.center = np.asarray(center, dtype=float).reshape(-1)
        self.radius = float(radius)
        if not self.radius > 0:
            raise DegenerateInputError(f"ball radius must be positive, got {radius}")

    @property
    def dim(self):
        return self.center.shape[0]

    def sample(self, rng, count):
        offsets = unit_directions(rng, self.dim, count) * rng.random(count)[:, None] ** (1.0 / self.dim)
        return self.center + self.radius * offsets

    def contains(self, X):
        return np.linalg.norm(X - self.center, axis=-1) <= self.radius

    def bounds(self):
        return self.center - self.radius, self.center + self.radius

    def describe(self):
        return {'type': 'ball', 'center': self.center.tolist(), 'radius': self.radius}


class Box:
    """Axis-aligned box [lower, upper] in R^n"""

    def __init__(self, lower, upper):
        self.lower = np.asarray(lower, dtype=float).reshape(-1)
        self.upper = np.asarray(upper, dtype=float).reshape(-1)
        if self.lower.shape != self.upper.shape:
            raise DimensionMismatchError('box corner dimension', self.lower.shape[0], self.upper.shape[0])
        if not np.all(self.upper > self.lower):
            raise DegenerateInputError(f"empty box [{self.lower.tolist()}, {self.upper.tolist()}]")

    @property
    def dim(self):
        return self.lower.shape[0]

    def sample(self, rng, count):
        return self.lower + (self.upper - self.lower) * rng.random((count, self.dim))

    def contains(self, X):
        return np.all((X >= self.lower) & (X <= self.upper), axis=-1)

    def bounds(self):
        return self.lower, self.upper

    def describe(self):
        return {'type': 'box', 'lower': self.lower.tolist(), 'upper': self.upper.tolist()}


class Annulus:
    """Spherical shell inner <= |x - center| <= outer in R^n"""

    def __init__(self, center, inner, outer):
        self.center = np.asarray(center, dtype=float).reshape(-1)
        self.inner = float(inner)
        self.outer = float(outer)
        if not 0 <= self.inner < self.outer:
            raise DegenerateInputError(f"empty annulus with radii {inner}, {outer}")

    @property
    def dim(self):
        return self.center.shape[0]

    def sample(self, rng, count):
        n = self.dim
        u = rng.random(count)
        radii = (self.inner ** n + u * (self.outer ** n - self.inner ** n)) ** (1.0 / n)
        return self.center + unit_directions(rng, n, count) * radii[:, None]

    def contains(self, X):
        distance = np.linalg.norm(X - self.center, axis=-1)
        return (distance >= self.inner) & (distance <= self.outer)

    def bounds(self):
        return self.center - self.outer, self.center + self.outer

    def describe(self):
        return {'type': 'annulus', 'center': self.center.tolist(), 'inner': self.inner, 'outer': self.outer}


def pair_mean_and_error(values):
    """Mean and standard error from antithetic pairs

    Args:
        values (ndarray): Shape (2, pairs); column j holds one antithetic pair

    Returns:
        tuple: (mean, std_error) treating the pair means as independent draws
    """
    pair_means = values.mean(axis=0)
    mean = float(pair_means.mean())
    if pair_means.shape[0] < 2:
        return mean, 0.0
    error = float(pair_means.std(ddof=1) / np.sqrt(pair_means.shape[0]))
    return mean, error


def combine_batches(batches):
    """Merge per-batch (mean, std_error, count) triples into one estimate"""
    counts = np.array([b[2] for b in batches], dtype=float)
    means = np.array([b[0] for b in batches])
    errors = np.array([b[1] for b in batches])
    total = counts.sum()
    mean = float(np.sum(counts * means) / total)
    error = float(np.sqrt(np.sum((counts * errors) ** 2)) / total)
    return mean, error
