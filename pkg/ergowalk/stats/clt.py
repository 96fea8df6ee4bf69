"""Central limit theorem for phi = psi - P psi along stationary walks.

The limit variance is ||psi||^2 - ||P psi||^2 in L2(nu); the experiment
compares it with the spread of (1/sqrt n) sum_{k<n} phi(omega_k) over an
ensemble of walks started from nu.
"""

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from ergowalk.cohomology.observables import FunctionObservable
from ergowalk.errors import PreconditionError
from ergowalk.markov.operator import pointwise_P
from ergowalk.markov.stationary import require_stationary
from ergowalk.stats.sampling import nu_sampler
from ergowalk.walk.simulate import simulate_ensemble

logger = logging.getLogger(__name__)

VARIANCE_ROUNDOFF = 1e-12
DEGENERATE_VARIANCE = 1e-12
KS_THRESHOLD = 0.03
DECILES = tuple(np.round(np.arange(1, 10) / 10.0, 1))


def gordin_variance(system, profile, density, psi, check=True):
    """sigma^2 = int psi^2 rho dmu - int (P psi)^2 rho dmu by quadrature."""
    if check:
        require_stationary(system, profile, density)
    x = density.quadrature.nodes
    rho = density.evaluator(x) if density.evaluator is not None else density.values
    integrate = density.quadrature.integrate
    values = psi(x)
    image = pointwise_P(system, profile, psi, x)
    sigma2 = integrate(values * values * rho) - integrate(image * image * rho)
    if sigma2 < 0:
        if sigma2 < -VARIANCE_ROUNDOFF:
            raise PreconditionError(f"negative variance {sigma2:.3e}: density is not stationary for P")
        logger.warning("variance %.3e clamped to zero", sigma2)
        sigma2 = 0.0
    return float(sigma2)


def martingale_part(system, profile, psi):
    def phi(x):
        return psi(x) - pointwise_P(system, profile, psi, x)

    return FunctionObservable(phi, holder=None, provenance="exact", name="psi - P psi")


@dataclass
class CltReport:
    psi: dict
    sigma2: float
    n_walks: int
    n_steps: int
    ks: float = None
    ks_pvalue: float = None
    threshold: float = KS_THRESHOLD
    degenerate: bool = False
    empirical_variance: float = 0.0
    variance_stderr: float = 0.0
    deciles: list = field(default_factory=list)

    @property
    def passed(self):
        return None if self.degenerate else self.ks <= self.threshold

    @property
    def variance_zscore(self):
        if self.variance_stderr == 0:
            return 0.0
        return (self.empirical_variance - self.sigma2) / self.variance_stderr

    def decile_rows(self):
        return ["quantile", "empirical", "normal"], [list(row) for row in self.deciles]

    def to_record(self):
        return {
            "psi": self.psi,
            "sigma2": self.sigma2,
            "n_walks": self.n_walks,
            "n_steps": self.n_steps,
            "ks": self.ks,
            "ks_pvalue": self.ks_pvalue,
            "threshold": self.threshold,
            "passed": self.passed,
            "degenerate": self.degenerate,
            "empirical_variance": self.empirical_variance,
            "variance_stderr": self.variance_stderr,
            "deciles": [list(row) for row in self.deciles],
        }


def normalized_sums(system, profile, density, psi, n_walks, n_steps, master_seed, threads=1):
    """(1/sqrt n) sum_{k<n} phi(omega_k), k = 0 included, one value per walk started from nu."""
    phi = martingale_part(system, profile, psi)
    ensemble = simulate_ensemble(
        system, profile, n_walks, n_steps, master_seed,
        start_sampler=nu_sampler(system, density), stride=n_steps,
        observable=phi, checkpoints=(n_steps,), threads=threads,
    )
    return ensemble.observable_sums[:, -1] / np.sqrt(n_steps)


def clt_experiment(system, profile, density, psi, n_walks, n_steps, master_seed, threads=1,
                   threshold=KS_THRESHOLD, check=True):
    sigma2 = gordin_variance(system, profile, density, psi, check=check)
    sums = normalized_sums(system, profile, density, psi, n_walks, n_steps, master_seed, threads)
    var = float(np.var(sums, ddof=1)) if n_walks > 1 else 0.0
    report = CltReport(
        psi=psi.describe(),
        sigma2=sigma2,
        n_walks=int(n_walks),
        n_steps=int(n_steps),
        threshold=threshold,
        empirical_variance=var,
        # normal-theory standard error of a sample variance
        variance_stderr=var * float(np.sqrt(2.0 / max(n_walks - 1, 1))),
    )
    if sigma2 < DEGENERATE_VARIANCE:
        report.degenerate = True
        logger.warning("degenerate variance %.3e: no KS test", sigma2)
        return report
    sigma = np.sqrt(sigma2)
    test = stats.kstest(sums, "norm", args=(0.0, sigma))
    report.ks = float(test.statistic)
    report.ks_pvalue = float(test.pvalue)
    empirical = np.quantile(sums, DECILES)
    normal = stats.norm.ppf(DECILES, loc=0.0, scale=sigma)
    report.deciles = [(float(q), float(e), float(g)) for q, e, g in zip(DECILES, empirical, normal)]
    logger.info("CLT: sigma^2 %.6g, empirical %.6g, KS %.4f", sigma2, var, report.ks)
    return report
