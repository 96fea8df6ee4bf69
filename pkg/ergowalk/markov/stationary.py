import logging
import time
from collections import deque
from dataclasses import asdict, dataclass, field

import numpy as np

from ergowalk.errors import PreconditionError
from ergowalk.markov.density import DensityField
from ergowalk.markov.operator import MarkovOperator, pointwise_P

logger = logging.getLogger(__name__)

SYMMETRY_TOLERANCE = 1e-8
DEGENERACY_RATIO = 100.0
STATIONARITY_TOLERANCE = 1e-8


@dataclass(frozen=True)
class SymmetryDefect:
    """Integral of log phi against mu; ``estimate`` marks a Monte-Carlo value."""

    value: float
    stderr: float = 0.0
    estimate: bool = False

    def __float__(self):
        return self.value

    @property
    def symmetric(self):
        if self.estimate:
            return abs(self.value) <= max(SYMMETRY_TOLERANCE, 4.0 * self.stderr)
        return abs(self.value) <= SYMMETRY_TOLERANCE


def symmetry_defect(system, profile, quadrature=None, samples=100_000, rng=None):
    if system.kind == "geodesic":
        rng = rng if rng is not None else np.random.default_rng(0)
        values = profile.log_phi(system.mu_sample(rng, samples))
        return SymmetryDefect(
            float(np.mean(values)), float(np.std(values, ddof=1) / np.sqrt(samples)), estimate=True
        )
    quadrature = quadrature or system.mu_quadrature()
    return SymmetryDefect(quadrature.integrate(profile.log_phi(quadrature.nodes)))


@dataclass
class StationaryDiagnostics:
    iterations: int = 0
    converged: bool = False
    residual: float = np.inf
    degenerate: bool = False
    cesaro_window: int = 64
    check_iterations: list = field(default_factory=list)
    residual_history: list = field(default_factory=list)
    ratio_history: list = field(default_factory=list)
    wall_time: float = 0.0

    def to_record(self, include_timing=True):
        record = asdict(self)
        if not include_timing:
            record.pop("wall_time")
        return record


def _ratio(values):
    lo = float(np.min(values))
    return float(np.max(values)) / lo if lo > 0 else float("inf")


def stationary_iterate(
    system,
    profile,
    quadrature=None,
    max_iter=100_000,
    tol=1e-10,
    cesaro_window=64,
    degeneracy_ratio=DEGENERACY_RATIO,
    operator=None,
):
    """Cesaro-averaged iteration of the discrete P* from rho_0 = 1.

    Returns ``(density, residual, diagnostics)`` for the best averaged
    iterate.  Non-convergence and degeneracy are reported in the
    diagnostics, never raised.
    """
    start = time.perf_counter()
    quadrature = quadrature or system.mu_quadrature()
    operator = operator or MarkovOperator(system, profile, quadrature)
    w = quadrature.weights
    mass = w.copy()
    window = deque(maxlen=cesaro_window)
    check_every = max(1, cesaro_window // 4)
    diag = StationaryDiagnostics(cesaro_window=cesaro_window)
    best_mass, best_residual = mass, np.inf

    for it in range(1, max_iter + 1):
        mass = operator.push(mass)
        mass /= np.sum(mass)
        window.append(mass)
        if it > cesaro_window and it % check_every and it != max_iter:
            continue
        average = np.mean(np.stack(window), axis=0)
        residual = float(np.sum(np.abs(operator.push(average) - average)))
        ratio = _ratio(average / w)
        diag.check_iterations.append(it)
        diag.residual_history.append(residual)
        diag.ratio_history.append(ratio)
        logger.debug("iteration %d: residual %.3e, sup/inf %.4g", it, residual, ratio)
        if residual < best_residual:
            best_mass, best_residual = average, residual
        if ratio > degeneracy_ratio and not diag.degenerate:
            diag.degenerate = True
            logger.warning("sup/inf ratio %.3g exceeded %.3g at iteration %d", ratio, degeneracy_ratio, it)
        if residual <= tol:
            diag.converged = True
            break

    diag.iterations = it
    diag.residual = best_residual
    diag.wall_time = time.perf_counter() - start
    if diag.converged:
        logger.info("stationary iteration converged after %d iterations (residual %.3e)", it, best_residual)
    else:
        logger.warning("stationary iteration stopped at %d iterations, residual %.3e", it, best_residual)
    density = DensityField.from_values(quadrature, best_mass / w)
    return density, best_residual, diag


def stationarity_residual(system, profile, density, operator=None):
    """L1(mu) residual of P* rho - rho; pointwise when the density has a closed form."""
    quadrature = density.quadrature
    if density.evaluator is not None:
        x = quadrature.nodes
        fwd = system.apply(x, 1)
        bwd = system.apply(x, -1)
        rho = density.evaluator
        image = profile.p(bwd) * rho(bwd) + profile.q(fwd) * rho(fwd)
        return quadrature.integrate(np.abs(image - rho(x)))
    operator = operator or MarkovOperator(system, profile, quadrature)
    return operator.residual(density)


def require_stationary(system, profile, density, tol=STATIONARITY_TOLERANCE):
    residual = stationarity_residual(system, profile, density)
    if not residual <= tol:
        raise PreconditionError(f"density is not stationary: residual {residual:.3e} > {tol:.1e}")
    return residual


def _node_density(density):
    if density.evaluator is not None:
        return density.evaluator(density.quadrature.nodes)
    return density.values


def l2_contraction(system, profile, density, psi):
    x = density.quadrature.nodes
    rho = _node_density(density)
    values = psi(x)
    image = pointwise_P(system, profile, psi, x)
    integrate = density.quadrature.integrate
    return float(np.sqrt(integrate(image**2 * rho))), float(np.sqrt(integrate(values**2 * rho)))


def self_adjointness_defect(system, profile, density, psi, chi):
    x = density.quadrature.nodes
    rho = _node_density(density)
    integrate = density.quadrature.integrate
    left = integrate(pointwise_P(system, profile, psi, x) * chi(x) * rho)
    right = integrate(psi(x) * pointwise_P(system, profile, chi, x) * rho)
    return abs(left - right)


def transfer_density_identity(system, profile, points):
    """Max relative defect of p / (q o f) = (pi o f) / pi with pi = e^u / q."""
    if profile.provenance is None:
        raise PreconditionError("the density identity needs a transfer-built profile")
    u = profile.provenance.u
    fx = system.apply(points, 1)

    def pi(y):
        return np.exp(u(y)) / profile.q(y)

    left = profile.p(points) / profile.q(fx)
    right = pi(fx) / pi(points)
    return float(np.max(np.abs(left - right) / np.abs(right)))
