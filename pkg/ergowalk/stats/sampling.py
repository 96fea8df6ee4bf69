"""Sampling environments from the stationary law nu = rho mu."""

import logging

import numpy as np

from ergowalk.errors import ConfigError, PreconditionError
from ergowalk.markov.density import DensityField

logger = logging.getLogger(__name__)

BOUND_SAMPLES = 4096
# headroom over a sampled or node-wise maximum of a smooth density
BOUND_MARGIN = 1.25


def _inverse_cdf(density, n, rng):
    quad = density.quadrature
    cells = quad.resolution
    cdf = np.cumsum(quad.weights * density.values)
    cdf /= cdf[-1]
    u = rng.random((n, 2))
    idx = np.minimum(np.searchsorted(cdf, u[:, 0], side="right"), cells - 1)
    return (idx + u[:, 1]) / cells


def _rejection(propose, rho, bound, n, rng):
    out, have = [], 0
    while have < n:
        m = max(64, 2 * (n - have))
        x = propose(m)
        values = rho(x)
        if np.any(values > bound):
            logger.warning("density exceeded its rejection bound (%.4g > %.4g)", float(np.max(values)), bound)
        keep = rng.random(m) * bound < values
        out.append(x[keep])
        have += int(keep.sum())
    return np.concatenate(out)[:n]


def closed_form_bound(system, rho, rng):
    """Sampled supremum of an unnormalised density, with headroom."""
    return BOUND_MARGIN * float(np.max(rho(system.mu_sample(rng, BOUND_SAMPLES))))


def sample_nu(system, density, n, rng, bound=None):
    """n environments distributed as nu.

    ``density`` is a DensityField (circle: inverse CDF of the cell masses;
    torus: rejection against the node maximum) or, on the geodesic model,
    an unnormalised closed-form callable sampled by rejection from Haar
    proposals.
    """
    n = int(n)
    if n < 1:
        raise ConfigError(f"sample size must be positive, got {n}")
    if isinstance(density, DensityField):
        if density.quadrature.kind != system.kind:
            raise PreconditionError(f"{density.quadrature.kind} density used with a {system.kind} system")
        if system.kind == "rotation":
            return _inverse_cdf(density, n, rng)
        if bound is None:
            bound = float(np.max(density.values))
            if density.evaluator is not None:
                bound *= BOUND_MARGIN
        return _rejection(lambda m: system.mu_sample(rng, m), density, bound, n, rng)
    if not callable(density):
        raise ConfigError(f"cannot sample from a {type(density).__name__}")
    if bound is None:
        bound = closed_form_bound(system, density, rng)
    return _rejection(lambda m: system.mu_sample(rng, m), density, bound, n, rng)


def nu_sampler(system, density, bound=None):
    if bound is None and not isinstance(density, DensityField):
        bound = closed_form_bound(system, density, np.random.default_rng(0))

    def sampler(rng):
        return sample_nu(system, density, 1, rng, bound=bound)[0]

    return sampler


def nu_expectation(system, density, values_fn, rng=None, samples=100_000):
    """(integral of values_fn against nu, standard error); exact quadrature on grids."""
    if isinstance(density, DensityField):
        return float(density.integrate(values_fn)), 0.0
    rng = rng if rng is not None else np.random.default_rng(0)
    x = system.mu_sample(rng, samples)
    w = density(x)
    v = values_fn(x)
    mean = float(np.sum(w * v) / np.sum(w))
    # ratio-estimator standard error
    resid = w * (v - mean)
    stderr = float(np.sqrt(np.sum(resid**2)) / np.sum(w))
    return mean, stderr
