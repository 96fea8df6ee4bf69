import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from ergowalk.cohomology.observables import (
    CoboundaryObservable,
    ConstantObservable,
    GridObservable,
    Observable,
)
from ergowalk.errors import ConfigError, ProfileClampError

logger = logging.getLogger(__name__)

P_CLAMP = 1e-4
BOUND_GRID = {"rotation": 4096, "cat": 128}
BOUND_SAMPLES = 4096


class _Sigmoid(Observable):
    def __init__(self, log_phi, sign=1.0):
        self.log_phi = log_phi
        self.sign = sign
        self.provenance = log_phi.provenance
        if log_phi.holder is not None:
            self.holder_exponent = log_phi.holder[0]
            self.holder_constant = log_phi.holder[1] / 4.0

    def evaluate(self, x):
        return special.expit(self.sign * self.log_phi(x))


class _Logit(Observable):
    def __init__(self, p):
        self.p = p
        self.provenance = p.provenance

    def evaluate(self, x):
        return special.logit(self.p(x))


class _Complement(Observable):
    def __init__(self, p):
        self.p = p
        self.provenance = p.provenance
        self.holder_exponent, self.holder_constant = (p.holder or (None, None))

    def evaluate(self, x):
        return 1.0 - self.p(x)


@dataclass(frozen=True)
class TransferProvenance:
    """Record of the transfer function u a profile was built from."""

    u: Observable

    def density(self, system):
        """Unnormalised closed-form stationary density e^u + e^{u o f}."""
        u = self.u

        def rho(x):
            return np.exp(u(x)) + np.exp(u(system.apply(x, 1)))

        return rho


def bound_points(system, rng=None):
    if system.kind in BOUND_GRID:
        return system.mu_quadrature(BOUND_GRID[system.kind]).nodes
    rng = rng or np.random.default_rng(0)
    return system.mu_sample(rng, BOUND_SAMPLES)


class EnvironmentProfile:
    """Transition law p of the walk, with q = 1 - p, phi = p / q and log phi."""

    def __init__(self, system, p, log_phi=None, q=None, provenance=None, kind="custom", validate=True):
        self.system = system
        self.p = p
        self.log_phi = log_phi if log_phi is not None else _Logit(p)
        self.q = q if q is not None else _Complement(p)
        self.provenance = provenance
        self.kind = kind
        values = p(bound_points(system))
        self.p_min = float(np.min(values))
        self.p_max = float(np.max(values))
        if validate and (self.p_min < P_CLAMP or self.p_max > 1.0 - P_CLAMP):
            raise ProfileClampError(self.p_min, self.p_max)
        if isinstance(self.log_phi, _Logit) and p.holder is not None and validate:
            beta, h = p.holder
            self.log_phi.holder_exponent = beta
            self.log_phi.holder_constant = h / (self.p_min * (1.0 - self.p_max))

    def phi(self, x):
        return np.exp(self.log_phi(x))

    @property
    def holder(self):
        return self.p.holder

    @property
    def is_constant(self):
        return isinstance(self.p, ConstantObservable)

    def closed_form_density(self):
        """Unnormalised stationary density when built from a transfer function, else None."""
        if self.provenance is None:
            return None
        return self.provenance.density(self.system)

    def describe(self):
        record = {
            "kind": self.kind,
            "p_min": self.p_min,
            "p_max": self.p_max,
            "p": self.p.describe(),
        }
        if self.provenance is not None:
            record["transfer"] = self.provenance.u.describe()
        return record


def constant_profile(system, p, validate=True):
    """Bernoulli baseline: the quenched law does not depend on the environment."""
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise ConfigError(f"constant transition probability must lie in [0, 1], got {p}")
    ndim = len(system.point_shape)
    if 0.0 < p < 1.0:
        log_phi = math.log(p) - math.log1p(-p)
    else:
        log_phi = math.copysign(math.inf, p - 0.5)
    return EnvironmentProfile(
        system,
        ConstantObservable(p, ndim),
        log_phi=ConstantObservable(log_phi, ndim),
        q=ConstantObservable(1.0 - p, ndim),
        kind="constant",
        validate=validate,
    )


def profile_from_p(system, p, kind="custom"):
    return EnvironmentProfile(system, p, kind=kind)


def profile_from_log_phi(system, log_phi, kind="log_phi"):
    return EnvironmentProfile(
        system, _Sigmoid(log_phi), log_phi=log_phi, q=_Sigmoid(log_phi, -1.0), kind=kind
    )


def grid_profile(system, quadrature, values):
    return profile_from_p(system, GridObservable(quadrature, values), kind="grid")


def make_profile_from_transfer(system, u):
    """Profile with log phi = u o f - u; its stationary density is e^u + e^{u o f} up to scale."""
    log_phi = CoboundaryObservable(system, u)
    profile = EnvironmentProfile(
        system,
        _Sigmoid(log_phi),
        log_phi=log_phi,
        q=_Sigmoid(log_phi, -1.0),
        provenance=TransferProvenance(u),
        kind="transfer",
    )
    logger.debug("transfer profile on %s: p in [%.4g, %.4g]", system.kind, profile.p_min, profile.p_max)
    return profile
