from dataclasses import dataclass, field

import numpy as np

from ergowalk.errors import ConfigError
from ergowalk.walk.simulate import WalkEnsemble


def _column(samples, name):
    if isinstance(samples, WalkEnsemble):
        return np.asarray(getattr(samples, name))
    return np.array([getattr(s, name) for s in samples])


@dataclass
class RecurrenceReport:
    """Per-walk return and range summary; returns are censored at the walk length."""

    n_steps: int
    n_cells: int
    first_return: np.ndarray
    min_position: np.ndarray
    max_position: np.ndarray
    final_position: np.ndarray
    visited_cells: np.ndarray
    seeds: list = field(default_factory=list)

    @property
    def n_walks(self):
        return len(self.first_return)

    @property
    def returned(self):
        return self.first_return >= 0

    @property
    def censored(self):
        return ~self.returned

    @property
    def sign_coverage(self):
        return (self.min_position < 0) & (self.max_position > 0)

    @property
    def cell_coverage(self):
        return self.visited_cells / self.n_cells

    @property
    def coverage_efficiency(self):
        distinct = self.max_position - self.min_position + 1
        return self.visited_cells / np.minimum(self.n_cells, distinct)

    @property
    def return_fraction(self):
        return float(np.mean(self.returned))

    @property
    def sign_coverage_fraction(self):
        return float(np.mean(self.sign_coverage))

    def summary(self):
        returned = self.first_return[self.returned]
        return {
            "n_walks": self.n_walks,
            "n_steps": self.n_steps,
            "n_cells": self.n_cells,
            "return_fraction": self.return_fraction,
            "censored_fraction": float(np.mean(self.censored)),
            "median_first_return": float(np.median(returned)) if returned.size else None,
            "sign_coverage_fraction": self.sign_coverage_fraction,
            "median_cell_coverage": float(np.median(self.cell_coverage)),
            "median_coverage_efficiency": float(np.median(self.coverage_efficiency)),
            "mean_final_position": float(np.mean(self.final_position)),
        }

    def header(self):
        return ["walk", "seed", "walk_index", "final_position", "min_position", "max_position",
                "first_return", "censored", "sign_coverage", "cell_coverage", "coverage_efficiency"]

    def rows(self):
        seeds = self.seeds or [(None, None)] * self.n_walks
        coverage = self.cell_coverage
        efficiency = self.coverage_efficiency
        signs = self.sign_coverage
        return [
            [i, seeds[i][0], seeds[i][1], int(self.final_position[i]), int(self.min_position[i]),
             int(self.max_position[i]), int(self.first_return[i]), int(not self.returned[i]),
             int(signs[i]), float(coverage[i]), float(efficiency[i])]
            for i in range(self.n_walks)
        ]


def recurrence_stats(samples):
    """Return times, ranges and orbit-cell coverage for a batch of walks."""
    if len(samples) == 0:
        raise ConfigError("recurrence statistics need at least one walk")
    if isinstance(samples, WalkEnsemble):
        n_steps, n_cells = samples.n_steps, samples.n_cells
        if samples.master_seed is not None:
            seeds = [(samples.master_seed, int(i)) for i in samples.indices]
        else:
            seeds = []
    else:
        samples = list(samples)
        n_steps, n_cells = samples[0].n_steps, samples[0].n_cells
        if any(s.n_steps != n_steps or s.n_cells != n_cells for s in samples):
            raise ConfigError("walks of different length or partition cannot be pooled")
        seeds = [s.seed or (None, None) for s in samples]
    return RecurrenceReport(
        n_steps=n_steps,
        n_cells=n_cells,
        first_return=_column(samples, "first_return"),
        min_position=_column(samples, "min_position"),
        max_position=_column(samples, "max_position"),
        final_position=_column(samples, "final_position"),
        visited_cells=_column(samples, "visited_cells"),
        seeds=seeds,
    )
