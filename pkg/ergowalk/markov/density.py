from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from ergowalk.dynamics.base import Quadrature
from ergowalk.errors import ConfigError, GridAlignmentError

MASS_TOLERANCE = 1e-12


@dataclass(frozen=True)
class DensityField:
    """Density with respect to the invariant volume, sampled on a quadrature grid.

    ``evaluator`` optionally carries a normalised closed form used for
    pointwise evaluation off the grid.
    """

    quadrature: Quadrature
    values: np.ndarray
    evaluator: Optional[Callable] = None

    def __post_init__(self):
        values = np.array(self.values, dtype=np.float64).reshape(-1)
        if values.shape[0] != self.quadrature.size:
            raise GridAlignmentError(
                f"density has {values.shape[0]} values, grid has {self.quadrature.size} nodes"
            )
        if not np.all(np.isfinite(values)) or np.any(values < 0):
            raise ConfigError("density values must be finite and nonnegative")
        mass = self.quadrature.integrate(values)
        if abs(mass - 1.0) > MASS_TOLERANCE:
            raise ConfigError(f"density mass {mass!r} differs from 1; use DensityField.from_values")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @classmethod
    def from_values(cls, quadrature, values, evaluator=None):
        values = np.maximum(np.asarray(values, dtype=np.float64).reshape(-1), 0.0)
        mass = quadrature.integrate(values)
        if not mass > 0:
            raise ConfigError("cannot normalise a density with zero mass")
        return cls(quadrature, values / mass, evaluator)

    @classmethod
    def from_function(cls, quadrature, fn):
        values = np.asarray(fn(quadrature.nodes), dtype=np.float64)
        mass = quadrature.integrate(values)

        def evaluator(x):
            return np.asarray(fn(x), dtype=np.float64) / mass

        return cls.from_values(quadrature, values, evaluator)

    @classmethod
    def uniform(cls, quadrature):
        return cls(quadrature, np.ones(quadrature.size))

    @property
    def mass(self):
        return self.quadrature.integrate(self.values)

    @property
    def sup_inf_ratio(self):
        lo = float(np.min(self.values))
        hi = float(np.max(self.values))
        return np.inf if lo <= 0 else hi / lo

    def __call__(self, x):
        if self.evaluator is not None:
            return self.evaluator(x)
        return self.quadrature.interpolate(self.values, x)

    def integrate(self, values):
        """Integral of node values (or an observable) against nu = rho mu."""
        if callable(values):
            values = values(self.quadrature.nodes)
        return self.quadrature.integrate(np.asarray(values, dtype=np.float64) * self.values)

    def check_aligned(self, quadrature):
        if not self.quadrature.same_grid(quadrature):
            raise GridAlignmentError(
                f"density lives on a {self.quadrature.kind} grid of resolution "
                f"{self.quadrature.resolution}, expected {quadrature.kind} {quadrature.resolution}"
            )

    def rows(self):
        nodes = self.quadrature.nodes
        header = ["index", "x", "value"] if nodes.ndim == 1 else ["index", "x", "y", "value"]
        body = np.column_stack([np.arange(nodes.shape[0]), nodes, self.values])
        return header, body
