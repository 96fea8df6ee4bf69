"""Objects named by a RunConfig: system, profile, quadrature and stationary density."""

import logging

import numpy as np

from ergowalk.cohomology.observables import TrigObservable
from ergowalk.dynamics import create_system
from ergowalk.dynamics.base import midpoint_quadrature
from ergowalk.errors import ConfigError, PreconditionError
from ergowalk.geodesic.bump import BumpObservable
from ergowalk.markov.density import DensityField
from ergowalk.markov.profile import (
    constant_profile,
    grid_profile,
    make_profile_from_transfer,
    profile_from_log_phi,
)
from ergowalk.markov.stationary import stationary_iterate

logger = logging.getLogger(__name__)


def build_system(config):
    params = dict(config.system.parameters)
    if "matrix" in params:
        params["matrix"] = tuple(tuple(row) for row in params["matrix"])
    return create_system(config.system.kind, **params)


def build_trig(system, spec):
    dim = 1 if system.kind == "rotation" else 2
    return TrigObservable.from_terms(dim, spec.get("terms", []), spec.get("const", 0.0))


def default_psi(system):
    k = 1 if system.kind == "rotation" else [1, 0]
    return TrigObservable.from_terms(1 if system.kind == "rotation" else 2, [{"k": k, "cos": 1.0}])


def build_quadrature(system, config):
    if config.numerics.grid is None:
        return system.mu_quadrature()
    return system.mu_quadrature(config.numerics.grid)


def build_profile(system, config):
    kind = config.profile.kind
    params = config.profile.parameters
    if kind == "constant":
        return constant_profile(system, params["p"])
    if kind == "trig":
        return profile_from_log_phi(system, build_trig(system, params["log_phi"]), kind="trig")
    if kind == "transfer":
        if system.kind == "geodesic":
            u = BumpObservable(group=system.group, **params["u"].get("bump", {}))
        else:
            u = build_trig(system, params["u"])
        return make_profile_from_transfer(system, u)
    if kind == "grid":
        quadrature = midpoint_quadrature(system.kind, params["resolution"])
        values = np.asarray(params["values"], dtype=np.float64)
        if values.size != quadrature.size:
            raise ConfigError(f"grid profile has {values.size} values for {quadrature.size} nodes")
        return grid_profile(system, quadrature, values)
    raise ConfigError(f"Unsupported profile kind: {kind}")


def stationary_density(system, profile, quadrature, numerics):
    """(density, source): closed form when known, uniform for p = 1/2, else Cesaro iteration."""
    closed = profile.closed_form_density()
    if closed is not None:
        return DensityField.from_function(quadrature, closed), "closed-form"
    if profile.is_constant and profile.p_min == 0.5:
        return DensityField.uniform(quadrature), "uniform"
    density, residual, diag = stationary_iterate(
        system,
        profile,
        quadrature,
        max_iter=numerics.iterations,
        tol=numerics.tolerance,
        cesaro_window=numerics.cesaro_window,
        degeneracy_ratio=numerics.degeneracy_ratio,
    )
    if residual > numerics.stationarity_tolerance:
        raise PreconditionError(f"no stationary density: iteration stopped at residual {residual:.3e}")
    return density, "iterated"
