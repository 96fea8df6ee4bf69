from dataclasses import dataclass

import numpy as np

from ergowalk.errors import ConfigError, PointKindError, UnsupportedStructureError

LEAF_KINDS = ("s", "u")


def reduce_mod1(x):
    """Reduce coordinates to [0, 1) with floor semantics; idempotent."""
    x = np.asarray(x, dtype=np.float64)
    r = x - np.floor(x)
    # x - floor(x) rounds up to 1.0 for tiny negative inputs
    return np.where(r >= 1.0, 0.0, r)


def torus_delta(a, b):
    """Signed coordinate difference a - b folded into [-1/2, 1/2)."""
    d = np.asarray(a, dtype=np.float64) - np.asarray(b, dtype=np.float64)
    return d - np.floor(d + 0.5)


@dataclass(frozen=True)
class Quadrature:
    """Equal-weight midpoint rule for the invariant volume."""

    kind: str
    resolution: int
    nodes: np.ndarray
    weights: np.ndarray

    @property
    def grid_shape(self):
        if self.kind == "rotation":
            return (self.resolution,)
        return (self.resolution, self.resolution)

    @property
    def size(self):
        return self.weights.shape[0]

    def integrate(self, values):
        values = np.asarray(values, dtype=np.float64)
        if values.shape[0] != self.size:
            raise ConfigError(
                f"expected {self.size} node values, got array of shape {values.shape}"
            )
        # pairwise summation, fixed order for a given grid
        return float(np.sum(self.weights * values))

    def stencil(self, points):
        """Periodic linear (circle) or bilinear (torus) interpolation stencil.

        Returns ``(columns, weights)`` of shape ``(m, 2)`` or ``(m, 4)``;
        weights are nonnegative and sum to one per row.
        """
        n = self.resolution
        pts = np.asarray(points, dtype=np.float64)
        if self.kind == "rotation":
            s = pts.reshape(-1) * n - 0.5
            i0 = np.floor(s)
            theta = s - i0
            i0 = i0.astype(np.int64)
            cols = np.stack([np.mod(i0, n), np.mod(i0 + 1, n)], axis=-1)
            weights = np.stack([1.0 - theta, theta], axis=-1)
            return cols, weights
        pts = pts.reshape(-1, 2)
        s = pts * n - 0.5
        i0 = np.floor(s)
        theta = s - i0
        i0 = i0.astype(np.int64)
        ia, ib = np.mod(i0[:, 0], n), np.mod(i0[:, 0] + 1, n)
        ja, jb = np.mod(i0[:, 1], n), np.mod(i0[:, 1] + 1, n)
        tx, ty = theta[:, 0], theta[:, 1]
        cols = np.stack([ia * n + ja, ia * n + jb, ib * n + ja, ib * n + jb], axis=-1)
        weights = np.stack(
            [(1 - tx) * (1 - ty), (1 - tx) * ty, tx * (1 - ty), tx * ty], axis=-1
        )
        return cols, weights

    def interpolate(self, values, points):
        values = np.asarray(values, dtype=np.float64)
        cols, weights = self.stencil(points)
        out = np.sum(values[cols] * weights, axis=-1)
        shape = np.shape(points) if self.kind == "rotation" else np.shape(points)[:-1]
        return out.reshape(shape)

    def same_grid(self, other):
        return (
            isinstance(other, Quadrature)
            and other.kind == self.kind
            and other.resolution == self.resolution
        )


def midpoint_quadrature(kind, resolution):
    if int(resolution) != resolution or resolution < 8:
        raise ConfigError(f"quadrature resolution must be an integer >= 8, got {resolution}")
    n = int(resolution)
    axis = (np.arange(n) + 0.5) / n
    if kind == "rotation":
        nodes = axis.copy()
    else:
        xx, yy = np.meshgrid(axis, axis, indexing="ij")
        nodes = np.stack([xx.ravel(), yy.ravel()], axis=-1)
    weights = np.full(nodes.shape[0], 1.0 / nodes.shape[0])
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return Quadrature(kind=kind, resolution=n, nodes=nodes, weights=weights)


class DynamicalSystem:
    """Common surface of the driving systems.

    Points are numpy arrays with a kind-specific trailing shape
    (``point_shape``) and any number of leading batch dimensions.
    """

    kind = None
    point_shape = ()
    contraction = 1.0
    expansion = 1.0
    # Lipschitz constant of f and f^-1 in leaf/coordinate distance
    lipschitz = 1.0

    def check_points(self, x):
        raise NotImplementedError

    def apply(self, x, direction=1):
        raise NotImplementedError

    def leaf_flow(self, x, kind, t):
        raise UnsupportedStructureError(f"{self.kind} system has no hyperbolic leaves")

    def leaf_multiplier(self, kind):
        """Signed factor by which f (kind 's') or f^-1 (kind 'u') rescales leaf parameters."""
        raise UnsupportedStructureError(f"{self.kind} system has no hyperbolic leaves")

    def mu_quadrature(self, resolution=256):
        raise UnsupportedStructureError(f"no quadrature grid for the {self.kind} system")

    def mu_sample(self, rng, size=None):
        raise NotImplementedError

    def distance(self, x, y):
        raise NotImplementedError

    def cell_index(self, x, cells_per_axis=64):
        raise NotImplementedError

    def n_cells(self, cells_per_axis=64):
        raise NotImplementedError

    def describe(self):
        return {"kind": self.kind}

    def _check_leaf_kind(self, kind):
        if kind not in LEAF_KINDS:
            raise ConfigError(f"leaf kind must be one of {LEAF_KINDS}, got {kind!r}")

    @staticmethod
    def _direction(direction):
        d = np.asarray(direction)
        if not np.all(np.abs(d) == 1):
            raise ConfigError(f"direction must be +1 or -1, got {direction!r}")
        return d
