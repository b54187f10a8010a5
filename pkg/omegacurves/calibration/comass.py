"""Numerical comass by multi-start projected-gradient ascent on orthonormal frames

The objective f(V) = Σ_I ω_I det(V[I, :]) is maximized over m x n matrices
with orthonormal columns. Its Euclidean gradient is assembled from the
cofactors of the n x n minors; it is projected onto the tangent space of
the Stiefel manifold and each trial step is retracted back by the polar
factor. Steps are accepted only under the Armijo condition, so the
objective never decreases along a restart.
"""
from dataclasses import dataclass, field
import logging

import numpy as np

from omegacurves.errors import DegenerateInputError, OmegaCurveError
from omegacurves.exterior import Frame, evaluate
from omegacurves.utils.linalg import cofactors, det, polar_orthonormalize, random_orthonormal
from omegacurves.utils.seeding import get_rng, run_parallel

logger = logging.getLogger(__name__)

DEFAULT_RESTARTS = 64
DEFAULT_TOL = 1e-10
DEFAULT_MAX_ITER = 10_000
ARMIJO = 1e-4
MAX_HALVINGS = 50
MAX_STEP = 8.0
# below this tangent gradient norm a failed line search counts as convergence
GRADIENT_FLOOR = 1e-7
NORMALIZE_FLOOR = 1e-12


@dataclass(frozen=True)
class AscentResult:
    """Outcome of one restart"""
    value: float
    frame: np.ndarray
    iterations: int
    converged: bool
    trace: tuple = field(repr=False)


@dataclass(frozen=True)
class ComassReport:
    """Best value found by the multi-start ascent

    ``estimate`` is a lower bound for the true comass by construction and
    ``certified_upper_bound`` (sum of absolute coefficients) a valid upper
    bound.
    """
    estimate: float
    best_frame: Frame
    restarts_used: int
    ascent_tolerance: float
    certified_upper_bound: float
    converged: bool
    seed: int
    restart_values: tuple = field(repr=False, default=())
    restart_iterations: tuple = field(repr=False, default=())

    def to_dict(self):
        return {
            'estimate': self.estimate,
            'best_frame': self.best_frame.matrix.tolist(),
            'restarts_used': self.restarts_used,
            'ascent_tolerance': self.ascent_tolerance,
            'certified_upper_bound': self.certified_upper_bound,
            'converged': self.converged,
            'seed': self.seed,
            'restart_values': list(self.restart_values),
            'restart_iterations': list(self.restart_iterations),
        }


@dataclass(frozen=True)
class CalibrationVerdict:
    is_calibration: bool
    estimate: float
    tolerance: float
    report: ComassReport

    def __bool__(self):
        return self.is_calibration


def objective_and_gradient(rows, values, V):
    """f(V) and its Euclidean gradient

    Args:
        rows (ndarray): (T, n) zero-based row indices of the form's terms
        values (ndarray): (T,) coefficients
        V (ndarray): (m, n) frame matrix

    Returns:
        tuple: (float, ndarray of shape (m, n))
    """
    minors = V[rows, :]
    f = float(det(minors) @ values)
    weighted = cofactors(minors) * values[:, None, None]
    G = np.zeros_like(V)
    np.add.at(G, rows, weighted)
    return f, G


def _objective(rows, values, V):
    return float(det(V[rows, :]) @ values)


def ascend(rows, values, V0, tol=DEFAULT_TOL, max_iter=DEFAULT_MAX_ITER):
    """Projected-gradient ascent from V0 with polar retraction

    Returns:
        AscentResult: final value, frame, iteration count and value trace
    """
    V = polar_orthonormalize(V0)
    f, G = objective_and_gradient(rows, values, V)
    if f < 0:
        # flipping one vector negates the objective
        V[:, 0] = -V[:, 0]
        f, G = objective_and_gradient(rows, values, V)
    trace = [f]
    step = 1.0
    converged = False
    iterations = 0
    for iterations in range(1, max_iter + 1):
        sym = (V.T @ G + G.T @ V) / 2
        P = G - V @ sym
        gnorm2 = float(np.sum(P * P))
        if gnorm2 == 0.0:
            converged = True
            break
        step = min(2 * step, MAX_STEP)
        accepted = False
        for _ in range(MAX_HALVINGS):
            V_new = polar_orthonormalize(V + step * P)
            f_new = _objective(rows, values, V_new)
            if f_new >= f + ARMIJO * step * gnorm2:
                accepted = True
                break
            step /= 2
        if not accepted:
            converged = np.sqrt(gnorm2) <= GRADIENT_FLOOR
            break
        if f_new < f:
            raise OmegaCurveError(f"ascent step decreased the objective ({f} -> {f_new})")
        movement = float(np.linalg.norm(V_new - V))
        V = V_new
        f, G = objective_and_gradient(rows, values, V)
        trace.append(f)
        if movement < tol:
            converged = True
            break
    return AscentResult(value=f, frame=V, iterations=iterations, converged=bool(converged), trace=tuple(trace))


def _restart(rows, values, m, n, seed, index, tol, max_iter):
    rng = get_rng(seed, index)
    return ascend(rows, values, random_orthonormal(rng, m, n), tol=tol, max_iter=max_iter)


def _scaled_terms(form):
    if form.is_zero:
        raise DegenerateInputError("comass of the zero form is undefined")
    if form.degree < 1:
        raise OmegaCurveError("comass needs a form of positive degree")
    scale = max(abs(c) for _, c in form.items())
    rows, values = form.term_arrays()
    return rows, values / scale


def comass(form, restarts=DEFAULT_RESTARTS, tol=DEFAULT_TOL, seed=0, max_iter=DEFAULT_MAX_ITER, n_jobs=1):
    """Estimate the comass of a constant-coefficient form

    Restart i starts from a Gaussian frame drawn with sub-seed (seed, i),
    so raising ``restarts`` only adds candidates and the estimate never
    decreases for a fixed seed.

    Args:
        form (AlternatingForm): Nonzero form of degree n on R^m
        restarts (int): Number of independent starts (>= 1)
        tol (float): Stop a restart once the frame moves less than tol
        seed (int): Master seed
        max_iter (int): Iteration cap per restart
        n_jobs (int): joblib workers

    Returns:
        ComassReport: Best value, its frame and convergence flags
    """
    if restarts < 1:
        raise OmegaCurveError(f"restarts must be >= 1, got {restarts}")
    rows, values = _scaled_terms(form)
    m, n = form.ambient, form.degree
    results = run_parallel(
        _restart,
        [(rows, values, m, n, seed, i, tol, max_iter) for i in range(restarts)],
        n_jobs=n_jobs,
    )
    best = max(range(len(results)), key=lambda i: (results[i].value, -i))
    frame = Frame.from_matrix(results[best].frame)
    estimate = float(evaluate(form, frame))
    converged = results[best].converged
    if not converged:
        logger.warning(f"comass ascent hit the iteration cap ({max_iter}); returning best-so-far {estimate:.12g}")
    logger.debug(f"comass estimate {estimate:.12g} from {restarts} restarts (seed {seed})")
    return ComassReport(
        estimate=estimate,
        best_frame=frame,
        restarts_used=restarts,
        ascent_tolerance=tol,
        certified_upper_bound=form.l1_norm,
        converged=converged,
        seed=seed,
        restart_values=tuple(r.value for r in results),
        restart_iterations=tuple(r.iterations for r in results),
    )


def brute_force_comass(form, samples=1_000_000, seed=0, polish=8, batch=10_000, tol=DEFAULT_TOL):
    """Random-frame oracle for the comass

    Evaluates the form on ``samples`` uniformly random orthonormal frames,
    then polishes the ``polish`` best candidates by ascent. Used as the
    regression target of :func:`comass`.

    Returns:
        float: Largest value found
    """
    rows, values = _scaled_terms(form)
    scale = max(abs(c) for _, c in form.items())
    m, n = form.ambient, form.degree
    rng = get_rng(seed, 0)
    candidates = []
    drawn = 0
    while drawn < samples:
        size = min(batch, samples - drawn)
        frames = random_orthonormal(rng, m, n, size=size)
        scores = np.zeros(size)
        for I, c in zip(rows, values):
            scores += c * det(frames[:, I, :])
        top = np.argsort(np.abs(scores))[-polish:]
        for i in top:
            frame = frames[i].copy()
            # a negative score becomes positive by flipping one vector
            if scores[i] < 0:
                frame[:, 0] = -frame[:, 0]
            candidates.append((abs(float(scores[i])), frame))
        candidates = sorted(candidates, key=lambda item: item[0])[-polish:]
        drawn += size
    best = max(score for score, _ in candidates)
    for _, frame in candidates:
        best = max(best, ascend(rows, values, frame, tol=tol).value)
    return float(best * scale)


def normalize(form, report):
    """Rescale a form to unit comass

    Args:
        form (AlternatingForm): The form whose comass was estimated
        report (ComassReport): Its comass report

    Returns:
        AlternatingForm: form / report.estimate
    """
    if not report.estimate > NORMALIZE_FLOOR:
        raise DegenerateInputError(f"cannot normalize: comass estimate {report.estimate} vanishes")
    return form / report.estimate


def is_calibration(form, tol=1e-6, restarts=DEFAULT_RESTARTS, seed=0, n_jobs=1):
    """True iff the comass estimate is at most 1 + tol

    Constant-coefficient forms are closed, so the comass bound is the only
    condition to check.
    """
    report = comass(form, restarts=restarts, seed=seed, n_jobs=n_jobs)
    return CalibrationVerdict(
        is_calibration=report.estimate <= 1 + tol,
        estimate=report.estimate,
        tolerance=tol,
        report=report,
    )
