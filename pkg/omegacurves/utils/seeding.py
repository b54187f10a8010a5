"""Deterministic seeding and parallel execution

Every randomized quantity draws from a generator whose SeedSequence is
derived from the master seed and a spawn key naming the work item
(restart, radius, batch ...). Results therefore never depend on the
order in which joblib schedules the items.
"""
import numpy as np
from joblib import Parallel, delayed


def seed_sequence(seed, *key):
    """SeedSequence for the work item identified by key"""
    return np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in key))


def get_rng(seed, *key):
    """numpy Generator for the work item identified by key

    Args:
        seed (int): Master seed
        *key (int): Spawn key, e.g. (radius_index, batch_index)

    Returns:
        Generator: independent stream for that item
    """
    return np.random.default_rng(seed_sequence(seed, *key))


def run_parallel(func, argument_tuples, n_jobs=1):
    """Apply func to each argument tuple, in input order

    Threads are used so numpy kernels run concurrently without pickling.
    """
    argument_tuples = list(argument_tuples)
    if n_jobs == 1 or len(argument_tuples) <= 1:
        return [func(*args) for args in argument_tuples]
    return Parallel(n_jobs=n_jobs, prefer='threads')(delayed(func)(*args) for args in argument_tuples)
