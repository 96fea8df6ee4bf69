import logging

import numpy as np

from ergowalk.cohomology.functionals import DEFAULT_TOLERANCE, segment_terms
from ergowalk.errors import ObstructionLeakError, UnsupportedStructureError

logger = logging.getLogger(__name__)

LEAK_MARGIN = 1e-8


def coboundary_residual(system, obs, u, sample_points):
    """max |obs(x) - u(f x) + u(x)| over the given samples."""
    x = system.check_points(sample_points)
    return float(np.max(np.abs(obs(x) - u(system.apply(x, 1)) + u(x))))


def _path_values(system, obs, x0, params, tol):
    """Functional along x0 -(u, t)-> z -(s, s)-> y, batched over rows of params."""
    t, s = params[:, 0], params[:, 1]
    base = np.broadcast_to(x0, (params.shape[0], 2))
    v_u, b_u, _ = segment_terms(system, base, "u", t, obs, tol / 2.0)
    corner = system.leaf_flow(base, "u", t)
    v_s, b_s, _ = segment_terms(system, corner, "s", s, obs, tol / 2.0)
    return v_u + v_s, b_u + b_s


def transfer_from_paths(system, obs, targets, x0=(0.0, 0.0), K=2, tol=DEFAULT_TOLERANCE, check=True):
    """Transfer function u(y) = F(path x0 -> y)(obs), anchored at u(x0) = 0.

    With ``check`` each value is recomputed along the second-shortest lift;
    a discrepancy beyond the combined bounds means obs is not a coboundary.
    Returns ``(values, bounds)``.
    """
    if system.kind != "cat":
        raise UnsupportedStructureError("path reconstruction is implemented for the cat map")
    x0 = system.check_points(x0)
    targets = system.check_points(targets).reshape(-1, 2)
    lifts = system.connect_parameters(x0, targets, K)
    values, bounds = _path_values(system, obs, x0, lifts[:, 0], tol)
    if check:
        alt_values, alt_bounds = _path_values(system, obs, x0, lifts[:, 1], tol)
        gap = np.abs(values - alt_values)
        allowed = bounds + alt_bounds + LEAK_MARGIN
        if np.any(gap > allowed):
            worst = int(np.argmax(gap - allowed))
            raise ObstructionLeakError(
                f"path dependence {gap[worst]:.3e} exceeds bounds {allowed[worst]:.3e} "
                f"at target {targets[worst].tolist()}"
            )
        logger.debug("path independence holds, max gap %.3e", float(np.max(gap, initial=0.0)))
    return values, bounds
