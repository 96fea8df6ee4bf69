import logging

import numpy as np

from ergowalk.cohomology.report import OBSTRUCTION_MARGIN, ObstructionReport
from ergowalk.dynamics.cat import MAX_PERIOD
from ergowalk.errors import PeriodRangeError, UnsupportedStructureError

logger = logging.getLogger(__name__)


def orbit_sums(system, obs, n):
    """Birkhoff sums of obs over every orbit of minimal period n; (orbits, sums)."""
    orbits = system.periodic_orbits(n)
    if orbits.shape[0] == 0:
        return orbits, np.zeros(0)
    values = np.asarray(obs(orbits.reshape(-1, 2)), dtype=np.float64).reshape(orbits.shape[:2])
    return orbits, values.sum(axis=1)


def livshitz_obstruction(system, obs, max_period=6, margin=OBSTRUCTION_MARGIN):
    """Periodic-orbit criterion: every orbit sum of a coboundary vanishes."""
    if system.kind != "cat":
        raise UnsupportedStructureError("periodic-orbit sums are enumerated for the cat map only")
    if int(max_period) != max_period or not 1 <= max_period <= MAX_PERIOD:
        raise PeriodRangeError(f"max_period must be an integer in [1, {MAX_PERIOD}], got {max_period}")
    report = ObstructionReport(source="livshitz")
    counts = {}
    for n in range(1, int(max_period) + 1):
        orbits, sums = orbit_sums(system, obs, n)
        counts[n] = int(orbits.shape[0])
        for index, (orbit, value) in enumerate(zip(orbits, sums)):
            x, y = orbit[0]
            report.add(f"p{n}-{index}@({x:.12g},{y:.12g})", value, 0.0, margin)
        logger.debug("period %d: %d orbits, max |sum| %.3e", n, counts[n], np.max(np.abs(sums), initial=0.0))
    report.metadata.update({"max_period": int(max_period), "orbits_per_period": counts})
    logger.info("Livshitz scan up to period %d: verdict %s", max_period, report.verdict)
    return report
