import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ergowalk.errors import ConfigError
from ergowalk.stats.sampling import nu_expectation, nu_sampler
from ergowalk.walk.simulate import simulate_ensemble, simulate_quenched

logger = logging.getLogger(__name__)

DEFAULT_CHECKPOINTS = (100, 1_000, 10_000, 100_000)


def checkpoints_for(n_steps, checkpoints=DEFAULT_CHECKPOINTS):
    return tuple(sorted({int(c) for c in checkpoints if c < n_steps} | {int(n_steps)}))


@dataclass
class BirkhoffResult:
    """Running averages (1/n) sum_{k<n} obs(omega_k) at the checkpoints."""

    checkpoints: tuple
    averages: np.ndarray
    target: Optional[float] = None
    target_stderr: float = 0.0

    @property
    def final(self):
        return float(self.averages[..., -1].mean()) if self.averages.ndim > 1 else float(self.averages[-1])

    @property
    def error(self):
        return None if self.target is None else abs(self.final - self.target)

    def to_record(self):
        return {
            "checkpoints": list(self.checkpoints),
            "averages": np.asarray(self.averages).tolist(),
            "target": self.target,
            "target_stderr": self.target_stderr,
            "error": self.error,
        }


@dataclass
class BirkhoffEnsemble(BirkhoffResult):
    """Averages of many walks, shape (walks, checkpoints)."""

    @property
    def mean(self):
        return self.averages.mean(axis=0)

    @property
    def spread(self):
        n = self.averages.shape[0]
        if n < 2:
            return np.zeros(self.averages.shape[1])
        return self.averages.std(axis=0, ddof=1) / np.sqrt(n)

    def fraction_within(self, band):
        if self.target is None:
            raise ConfigError("no limit to compare against")
        return float(np.mean(np.abs(self.averages[:, -1] - self.target) <= band))

    def rows(self):
        header = ["checkpoint", "mean", "stderr"]
        return header, [[c, float(m), float(s)] for c, m, s in zip(self.checkpoints, self.mean, self.spread)]

    def to_record(self):
        record = super().to_record()
        record.pop("averages")
        record.update(
            n_walks=int(self.averages.shape[0]),
            mean=self.mean.tolist(),
            stderr=self.spread.tolist(),
        )
        return record


def birkhoff_average(system, profile, obs, x, n_steps, rng, density=None, checkpoints=DEFAULT_CHECKPOINTS):
    """Quenched Birkhoff averages along one walk from x.

    With a stationary ``density`` the limit integral of obs against nu is
    attached as ``target``.
    """
    points = checkpoints_for(n_steps, checkpoints)
    walk = simulate_quenched(system, profile, x, n_steps, rng, stride=n_steps,
                             observable=obs, checkpoints=points)
    target, stderr = (None, 0.0) if density is None else nu_expectation(system, density, obs)
    return BirkhoffResult(points, walk.birkhoff_averages(), target, stderr)


def birkhoff_ensemble(system, profile, obs, n_walks, n_steps, master_seed, density=None, starts=None,
                      checkpoints=DEFAULT_CHECKPOINTS, threads=1):
    """Birkhoff averages of ``n_walks`` walks, started from nu unless ``starts`` are given."""
    points = checkpoints_for(n_steps, checkpoints)
    sampler = None
    if starts is None and density is not None:
        sampler = nu_sampler(system, density)
    ensemble = simulate_ensemble(system, profile, n_walks, n_steps, master_seed, starts=starts,
                                 start_sampler=sampler, stride=n_steps, observable=obs,
                                 checkpoints=points, threads=threads)
    target, stderr = (None, 0.0) if density is None else nu_expectation(system, density, obs)
    result = BirkhoffEnsemble(points, ensemble.birkhoff_averages(), target, stderr)
    logger.info("birkhoff ensemble: final mean %.6g (target %s)", result.final, target)
    return result
