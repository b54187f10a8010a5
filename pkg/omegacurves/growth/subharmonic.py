"""Finite-difference subharmonicity of ρ = ‖DF‖^((n-2)/2), or log ‖DF‖ when n = 2

The Laplacian uses the (2n+1)-point stencil on a regular grid anchored at
the lower corner of the region's bounding box. Halving the step keeps
every coarse node on the fine grid, which is what the Richardson check
compares.
"""
from dataclasses import dataclass
import logging
import math

import numpy as np

from omegacurves.curve.residual import opnorm
from omegacurves.errors import DegenerateInputError, DimensionMismatchError, OmegaCurveError

logger = logging.getLogger(__name__)

DEFAULT_STEP = 1e-2
MARGIN_FACTOR = 10
MAX_NODES = 20_000_000
# an h^2 error shrinks 4x per halving; allow for higher-order terms
SECOND_ORDER_RATIO = 3.9


def _rho(model, norms):
    if model.n == 2:
        return np.log(norms)
    return norms ** ((model.n - 2) / 2)


def _grid(region, step):
    lower, upper = region.bounds()
    counts = np.floor((upper - lower) / step + 1e-9).astype(int) + 1
    if np.prod(counts.astype(float)) > MAX_NODES:
        raise OmegaCurveError(f"grid of {counts.tolist()} nodes is too large; increase the step")
    axes = [lower[k] + step * np.arange(counts[k]) for k in range(region.dim)]
    mesh = np.meshgrid(*axes, indexing='ij')
    return np.stack(mesh, axis=-1)


def _check_zero_set(model, nodes, margin):
    critical = model.critical_points()
    if critical is None:
        return
    if len(critical):
        distance = np.linalg.norm(nodes[:, None, :] - critical[None, :, :], axis=-1).min()
        if distance < margin:
            raise DegenerateInputError(
                f"region comes within {distance:.3g} of a zero of ‖DF‖; keep at least {margin:g} away"
            )


def laplacian_grid(model, region, grid_step=DEFAULT_STEP, margin=None):
    """Discrete Laplacian of ρ at every interior grid node

    A node is interior when it and its 2n stencil neighbours lie in the
    region.

    Args:
        model (CurveModel): Curve F
        region (Ball | Box | Annulus): Bounded region in R^n
        grid_step (float): Grid spacing h
        margin (float): Minimum distance to the zero set of ‖DF‖ (n = 2),
            10 h when omitted

    Returns:
        tuple: (nodes (N, n), laplacian (N,)) for the interior nodes
    """
    if region.dim != model.n:
        raise DimensionMismatchError('region dimension', model.n, region.dim)
    if not grid_step > 0:
        raise OmegaCurveError(f"grid step must be positive, got {grid_step}")
    n = model.n
    grid = _grid(region, grid_step)
    shape = grid.shape[:-1]
    flat = grid.reshape(-1, n)
    inside = region.contains(flat).reshape(shape)

    if n == 2:
        _check_zero_set(model, flat[inside.reshape(-1)], MARGIN_FACTOR * grid_step if margin is None else margin)

    norms = np.zeros(flat.shape[0])
    mask = inside.reshape(-1)
    norms[mask] = opnorm(model.jacobian(flat[mask]))
    if np.any(norms[mask] == 0):
        raise DegenerateInputError("‖DF‖ vanishes at a grid node inside the region")
    rho = np.zeros(flat.shape[0])
    rho[mask] = _rho(model, norms[mask])
    rho = rho.reshape(shape)

    interior = inside.copy()
    total = -2 * n * rho
    for k in range(n):
        forward = np.roll(rho, -1, axis=k)
        backward = np.roll(rho, 1, axis=k)
        total = total + forward + backward
        interior &= np.roll(inside, -1, axis=k) & np.roll(inside, 1, axis=k)
        edge = [slice(None)] * n
        edge[k] = [0, shape[k] - 1]
        interior[tuple(edge)] = False
    if not np.any(interior):
        raise DegenerateInputError("no interior grid node; decrease the step")
    return grid[interior], total[interior] / grid_step ** 2


def subharmonicity_min(model, region, grid_step=DEFAULT_STEP, margin=None):
    """Smallest discrete Laplacian of ρ over the interior grid nodes

    Conformal ω-curves give values >= -ε(h) with ε -> 0 as the step
    shrinks.
    """
    _, values = laplacian_grid(model, region, grid_step, margin)
    return float(values.min())


@dataclass(frozen=True)
class RichardsonCheck:
    """Laplacian minima of ρ at steps h and h/2 on the common coarse nodes"""
    step: float
    coarse_min: float
    fine_min: float
    improvement: float
    nodes: int

    @property
    def second_order(self):
        return self.improvement >= SECOND_ORDER_RATIO


def richardson_improvement(coarse_min, fine_min):
    """Factor by which the negative part of the Laplacian shrinks from h to h/2

    A negative part that only appears on the finer grid is a regression
    and scores 0.
    """
    if fine_min >= 0:
        return math.inf
    if coarse_min >= 0:
        return 0.0
    return coarse_min / fine_min


def subharmonicity_richardson(model, region, grid_step=DEFAULT_STEP, margin=None):
    """Compare the Laplacian minimum at step h and h/2

    Only coarse nodes that are interior on both grids count. For a
    harmonic or subharmonic ρ the negative part is pure discretization
    error, so a second-order stencil shrinks it by about 4.

    Returns:
        RichardsonCheck: improvement = coarse_min / fine_min when both are
            negative, inf when the fine grid shows no negative part and 0 when
            only the fine grid does
    """
    margin = MARGIN_FACTOR * grid_step if margin is None else margin
    coarse_nodes, coarse = laplacian_grid(model, region, grid_step, margin)
    fine_nodes, fine = laplacian_grid(model, region, grid_step / 2, margin)
    lower = region.bounds()[0]
    fine_index = {tuple(k): i for i, k in enumerate(np.rint((fine_nodes - lower) / (grid_step / 2)).astype(int))}
    pairs = [
        (i, fine_index[key])
        for i, key in enumerate(map(tuple, 2 * np.rint((coarse_nodes - lower) / grid_step).astype(int)))
        if key in fine_index
    ]
    if not pairs:
        raise DegenerateInputError("the coarse and fine grids share no interior node")
    coarse_idx, fine_idx = map(np.array, zip(*pairs))
    coarse_min = float(coarse[coarse_idx].min())
    fine_min = float(fine[fine_idx].min())
    improvement = richardson_improvement(coarse_min, fine_min)
    if improvement < SECOND_ORDER_RATIO:
        logger.warning(
            f"Laplacian of ρ for {model.name} improves only {improvement:.3g}x from step {grid_step:g} to {grid_step / 2:g}"
        )
    return RichardsonCheck(
        step=float(grid_step),
        coarse_min=coarse_min,
        fine_min=fine_min,
        improvement=float(improvement),
        nodes=len(pairs),
    )
