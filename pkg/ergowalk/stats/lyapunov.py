"""Balance of the fiber Lyapunov exponent along the unstable direction.

A recurrent walk cannot expand E^u on average, which forces
int log|Df|E^u| p dnu = -int log|Df^-1|E^u| q dnu.  With constant unstable
rates both sides reduce to log(lambda_u) times int p dnu and int q dnu.
"""

import logging
import math
from dataclasses import asdict, dataclass

import numpy as np

from ergowalk.errors import PreconditionError, UnsupportedStructureError
from ergowalk.markov.density import DensityField
from ergowalk.markov.stationary import require_stationary
from ergowalk.stats.sampling import nu_expectation, nu_sampler
from ergowalk.walk.simulate import simulate_ensemble

logger = logging.getLogger(__name__)

BALANCE_TOLERANCE = 1e-8
MC_SAMPLES = 200_000


@dataclass
class BalanceReport:
    system: str
    lhs: float
    rhs: float
    imbalance: float
    imbalance_stderr: float = 0.0
    asserted: bool = False
    fiber_exponent_mc: float = None
    stderr: float = None
    n_walks: int = 0
    n_steps: int = 0

    @property
    def balanced(self):
        """Only meaningful for transfer-built profiles; otherwise None."""
        if not self.asserted:
            return None
        return abs(self.imbalance) <= max(BALANCE_TOLERANCE, 4.0 * self.imbalance_stderr)

    @property
    def expected_exponent(self):
        return self.lhs - self.rhs

    @property
    def fiber_zscore(self):
        if self.fiber_exponent_mc is None or not self.stderr:
            return None
        return (self.fiber_exponent_mc - self.expected_exponent) / self.stderr

    def to_record(self):
        record = asdict(self)
        record.update(balanced=self.balanced, fiber_zscore=self.fiber_zscore)
        return record


def lyapunov_balance(system, profile, density=None, n_walks=0, n_steps=0, master_seed=0, threads=1,
                     samples=MC_SAMPLES, check=True):
    """lhs = log(lambda_u) int p dnu, rhs = log(lambda_u) int q dnu.

    On the torus ``density`` is a stationary DensityField and the integrals
    are quadratures.  On the geodesic model nu is the closed-form density of
    a transfer-built profile and the integrals are Monte-Carlo estimates.
    With ``n_walks`` the fiber exponent log(lambda_u) S_N / N is simulated
    from nu for comparison.
    """
    if system.kind not in ("cat", "geodesic"):
        raise UnsupportedStructureError(f"no unstable exponent for the {system.kind} system")
    log_lambda = math.log(system.lambda_u)
    if isinstance(density, DensityField):
        if check:
            require_stationary(system, profile, density)
    elif system.kind == "geodesic" and density is None:
        density = profile.closed_form_density()
        if density is None:
            raise PreconditionError("the geodesic balance needs a transfer-built profile")
    elif density is None or not callable(density):
        raise PreconditionError("a stationary density is required")

    rng = np.random.default_rng(master_seed)
    imbalance, imb_err = nu_expectation(
        system, density, lambda x: profile.p(x) - profile.q(x), rng, samples
    )
    # q = 1 - p, so int p dnu = (1 + imbalance) / 2
    p_int = 0.5 * (1.0 + imbalance)
    report = BalanceReport(
        system=system.kind,
        lhs=log_lambda * p_int,
        rhs=log_lambda * (p_int - imbalance),
        imbalance=imbalance,
        imbalance_stderr=imb_err,
        asserted=profile.provenance is not None,
    )
    if n_walks:
        ensemble = simulate_ensemble(
            system, profile, n_walks, n_steps, master_seed,
            start_sampler=nu_sampler(system, density), stride=n_steps, threads=threads,
        )
        rates = log_lambda * ensemble.final_position / n_steps
        report.fiber_exponent_mc = float(np.mean(rates))
        report.stderr = float(np.std(rates, ddof=1) / np.sqrt(n_walks)) if n_walks > 1 else 0.0
        report.n_walks, report.n_steps = int(n_walks), int(n_steps)
    logger.info("balance on %s: lhs %.10g rhs %.10g imbalance %.3e", system.kind, report.lhs, report.rhs, imbalance)
    return report
