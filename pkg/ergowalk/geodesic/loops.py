import logging

import numpy as np

from ergowalk.dynamics.geodesic import GeodesicFlow
from ergowalk.dynamics.paths import LOOP_TOLERANCE, SuLoop, SuPath
from ergowalk.errors import ConfigError, LoopClosureError, LoopNotClosedError
from ergowalk.geodesic.frames import as_matrix, leaf_matrix
from ergowalk.geodesic.group import default_group, mul2

logger = logging.getLogger(__name__)

NILPOTENT = {
    "s": np.array([[0.0, 1.0], [0.0, 0.0]]),
    "u": np.array([[0.0, 0.0], [1.0, 0.0]]),
}
STAGNATION_WINDOW = 20
STAGNATION_FACTOR = 0.9
PARAMETER_CAP = 4.0


def alternating_kinds(n):
    return tuple("s" if i % 2 == 0 else "u" for i in range(n))


def word_product(kinds, params):
    g = np.eye(2)
    for kind, t in zip(kinds, params):
        g = mul2(g, leaf_matrix(kind, t))
    return g


def closure_defect(kinds, params):
    return float(np.max(np.abs(word_product(kinds, params) - np.eye(2))))


def loop_defect(loop):
    return closure_defect(loop.kinds, loop.parameters)


def _jacobian(kinds, params, unknown):
    mats = [leaf_matrix(k, t) for k, t in zip(kinds, params)]
    cols = []
    for i in unknown:
        left = np.eye(2)
        for m in mats[:i]:
            left = mul2(left, m)
        right = np.eye(2)
        for m in mats[i + 1 :]:
            right = mul2(right, m)
        cols.append(mul2(mul2(left, NILPOTENT[kinds[i]]), right).ravel())
    return np.column_stack(cols)


def _default_free(n):
    if n == 5:
        return (0, 1)
    return tuple(range(n - 3))


def close_loop(x, seed_params, free_indices=None, tol=LOOP_TOLERANCE, group=None, max_iter=200):
    """Close an alternating su-word based at ``x`` by damped Gauss-Newton.

    The parameters at ``free_indices`` are held fixed; the remaining three
    are solved so that the segment word equals the identity.  Raises
    LoopClosureError when the defect stalls; callers reseed.
    """
    group = group or default_group()
    params = np.array(seed_params, dtype=np.float64)
    n = params.shape[0]
    if params.ndim != 1 or n < 5:
        raise ConfigError(f"loop closure needs at least 5 segment parameters, got {params.shape}")
    if np.max(np.abs(params)) > 1.0:
        raise ConfigError("seed parameters must satisfy |t| <= 1")
    free = tuple(_default_free(n) if free_indices is None else sorted(int(i) for i in free_indices))
    unknown = [i for i in range(n) if i not in free]
    if len(unknown) != 3:
        raise ConfigError(f"exactly 3 parameters must be solved for, got free indices {free}")
    kinds = alternating_kinds(n)

    defect = closure_defect(kinds, params)
    history = [defect]
    for it in range(max_iter):
        if defect <= tol * 1e-3:
            break
        if it >= STAGNATION_WINDOW and defect > STAGNATION_FACTOR * history[-STAGNATION_WINDOW - 1]:
            raise LoopClosureError(f"Newton stagnated at defect {defect:.3e} after {it} iterations")
        residual = (word_product(kinds, params) - np.eye(2)).ravel()
        step, *_ = np.linalg.lstsq(_jacobian(kinds, params, unknown), -residual, rcond=None)
        damping = 1.0
        while damping >= 1.0 / 64.0:
            trial = params.copy()
            trial[unknown] += damping * step
            trial_defect = closure_defect(kinds, trial)
            if trial_defect < defect:
                params, defect = trial, trial_defect
                break
            damping /= 2.0
        else:
            # no descent left: at roundoff level this is convergence
            break
        history.append(defect)
        logger.debug("closure iteration %d: defect %.3e (damping %.3g)", it, defect, damping)
    if not defect <= tol:
        raise LoopClosureError(f"loop closure defect {defect:.3e} above tolerance {tol:.1e}")

    system = GeodesicFlow(group)
    base = group.reduce(as_matrix(x))
    path = SuPath(base=base, segments=tuple(zip(kinds, params)))
    return SuLoop.close(system, path, tol=LOOP_TOLERANCE)


def random_loops(x, count, rng, n_segments=6, scale=0.5, group=None, max_attempts=50, tol=LOOP_TOLERANCE):
    """``count`` closed loops at ``x`` with uniformly drawn free parameters, reseeding failures."""
    group = group or default_group()
    loops = []
    for index in range(count):
        for attempt in range(max_attempts):
            seed = rng.uniform(-scale, scale, size=n_segments)
            try:
                loop = close_loop(x, seed, tol=tol, group=group)
            except (LoopClosureError, LoopNotClosedError) as exc:
                logger.debug("loop %d attempt %d reseeded: %s", index, attempt, exc)
                continue
            if np.max(np.abs(loop.parameters)) <= PARAMETER_CAP:
                loops.append(loop)
                break
        else:
            raise LoopClosureError(f"no closed loop found for index {index} after {max_attempts} seeds")
    return loops
