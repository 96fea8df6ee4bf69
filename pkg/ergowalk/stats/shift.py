import logging
from dataclasses import asdict, dataclass

import numpy as np
from scipy import stats

from ergowalk.errors import ConfigError
from ergowalk.stats.sampling import nu_sampler
from ergowalk.walk.rng import SHIFT, walk_stream
from ergowalk.walk.simulate import simulate_ensemble

logger = logging.getLogger(__name__)

SIGNIFICANCE = 0.01


@dataclass
class ShiftReport:
    shift: int
    n_walks: int
    statistic: float
    pvalue: float
    significance: float = SIGNIFICANCE

    @property
    def consistent(self):
        return self.pvalue >= self.significance

    def to_record(self):
        return {**asdict(self), "consistent": self.consistent}


def shift_consistency(system, profile, density, obs, n_walks, shift, master_seed, threads=1,
                      significance=SIGNIFICANCE):
    """Two-sample KS between obs(omega_shift) of walks from nu and obs at fresh draws from nu.

    Stationarity of nu makes both samples nu-distributed.
    """
    if int(shift) != shift or shift < 1:
        raise ConfigError(f"shift must be a positive integer, got {shift}")
    shift = int(shift)
    ensemble = simulate_ensemble(
        system, profile, n_walks, shift, master_seed,
        start_sampler=nu_sampler(system, density), stride=shift, threads=threads,
    )
    shifted = obs(ensemble.states[:, 1])
    sampler = nu_sampler(system, density)
    fresh = np.stack([sampler(walk_stream(master_seed, i, SHIFT)) for i in range(int(n_walks))])
    test = stats.ks_2samp(shifted, obs(fresh))
    report = ShiftReport(shift, int(n_walks), float(test.statistic), float(test.pvalue), significance)
    logger.info("shift %d: KS %.4f (p = %.3g)", shift, report.statistic, report.pvalue)
    return report
