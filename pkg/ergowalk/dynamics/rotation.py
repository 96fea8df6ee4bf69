import numpy as np

from ergowalk.dynamics.base import (
    DynamicalSystem,
    midpoint_quadrature,
    reduce_mod1,
    torus_delta,
)
from ergowalk.errors import ConfigError, PointKindError

GOLDEN_ANGLE = (np.sqrt(5.0) - 1.0) / 2.0


def rational_approximation(alpha, max_denominator=64, tol=1e-12):
    """Return (p, q) if alpha is within tol of p/q with q <= max_denominator."""
    for q in range(1, max_denominator + 1):
        p = round(alpha * q)
        if abs(alpha - p / q) < tol:
            return p, q
    return None


class Rotation(DynamicalSystem):
    """Circle rotation x -> x + alpha mod 1."""

    kind = "rotation"
    point_shape = ()

    def __init__(self, alpha=GOLDEN_ANGLE, allow_rational=False, **kwargs):
        alpha = float(alpha)
        if not 0.0 < alpha < 1.0:
            raise ConfigError(f"rotation angle must lie in (0, 1), got {alpha}")
        approx = rational_approximation(alpha)
        if approx is not None and not allow_rational:
            raise ConfigError(
                f"rotation angle {alpha!r} is numerically rational ({approx[0]}/{approx[1]})"
            )
        self.alpha = alpha

    def check_points(self, x):
        # a 1-D array is always a batch of circle points; torus points fail as (m, 2)
        x = np.asarray(x, dtype=np.float64)
        if x.ndim > 1:
            raise PointKindError(f"rotation points are scalars, got array of shape {x.shape}")
        return x

    def apply(self, x, direction=1):
        x = self.check_points(x)
        d = self._direction(direction)
        return reduce_mod1(x + d * self.alpha)

    def mu_quadrature(self, resolution=4096):
        return midpoint_quadrature(self.kind, resolution)

    def mu_sample(self, rng, size=None):
        return rng.random(size)

    def distance(self, x, y):
        return np.abs(torus_delta(x, y))

    def cell_index(self, x, cells_per_axis=64):
        x = self.check_points(x)
        return np.minimum((x * cells_per_axis).astype(np.int64), cells_per_axis - 1)

    def n_cells(self, cells_per_axis=64):
        return cells_per_axis

    def describe(self):
        return {"kind": self.kind, "alpha": self.alpha}
