import logging
import math

import numpy as np

from ergowalk.dynamics.base import (
    DynamicalSystem,
    midpoint_quadrature,
    reduce_mod1,
    torus_delta,
)
from ergowalk.dynamics.paths import SuPath
from ergowalk.errors import ConfigError, PeriodRangeError, PointKindError

logger = logging.getLogger(__name__)

DEFAULT_MATRIX = ((2, 1), (1, 1))
MAX_PERIOD = 14


def _extended_gcd(a, b):
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r != 0:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


def _int_matmul(m, n):
    return (
        (m[0][0] * n[0][0] + m[0][1] * n[1][0], m[0][0] * n[0][1] + m[0][1] * n[1][1]),
        (m[1][0] * n[0][0] + m[1][1] * n[1][0], m[1][0] * n[0][1] + m[1][1] * n[1][1]),
    )


def _unit_eigenvector(matrix, mu):
    (a, b), (c, d) = matrix
    if b != 0:
        v = np.array([float(b), mu - a])
    else:
        v = np.array([mu - d, float(c)])
    v /= np.linalg.norm(v)
    lead = v[0] if v[0] != 0 else v[1]
    return v if lead > 0 else -v


class CatMap(DynamicalSystem):
    """Hyperbolic toral automorphism (x, y) -> A (x, y) mod 1."""

    kind = "cat"
    point_shape = (2,)

    def __init__(self, matrix=DEFAULT_MATRIX, **kwargs):
        try:
            m = tuple(tuple(int(v) for v in row) for row in matrix)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"cat matrix must be a 2x2 integer matrix, got {matrix!r}") from exc
        if len(m) != 2 or any(len(row) != 2 for row in m):
            raise ConfigError(f"cat matrix must be 2x2, got {matrix!r}")
        if np.any(np.asarray(matrix, dtype=float) != np.asarray(m, dtype=float)):
            raise ConfigError(f"cat matrix entries must be integers, got {matrix!r}")
        (a, b), (c, d) = m
        det = a * d - b * c
        trace = a + d
        if det != 1:
            raise ConfigError(f"cat matrix must have determinant 1, got {det}")
        if abs(trace) <= 2:
            raise ConfigError(f"cat matrix must be hyperbolic (|trace| > 2), got trace {trace}")
        self.matrix = m
        self.inverse = ((d, -b), (-c, a))

        disc = math.sqrt(trace * trace - 4)
        # signed eigenvalues; both negative when the trace is
        if trace > 0:
            self.mu_u = (trace + disc) / 2.0
        else:
            self.mu_u = (trace - disc) / 2.0
        self.mu_s = 1.0 / self.mu_u
        self.lambda_u = abs(self.mu_u)
        self.lambda_s = abs(self.mu_s)
        self.contraction = self.lambda_s
        self.expansion = self.lambda_u
        self.e_u = _unit_eigenvector(m, self.mu_u)
        self.e_s = _unit_eigenvector(m, self.mu_s)
        A = np.asarray(m, dtype=np.float64)
        for name, mu, e in (("unstable", self.mu_u, self.e_u), ("stable", self.mu_s, self.e_s)):
            if np.max(np.abs(A @ e - mu * e)) > 1e-12:
                raise ConfigError(f"{name} eigen-direction of {m} failed its residual check")
        # det A = 1, so A and A^-1 share their operator norm
        self.lipschitz = float(np.linalg.norm(A, 2))
        self.e_u.setflags(write=False)
        self.e_s.setflags(write=False)

    def check_points(self, x):
        x = np.asarray(x, dtype=np.float64)
        if x.ndim == 0 or x.shape[-1] != 2:
            raise PointKindError(f"torus points have trailing dimension 2, got shape {x.shape}")
        return x

    def _linear(self, m, x):
        # elementwise products keep results independent of batch shape
        (a, b), (c, d) = m
        return np.stack([a * x[..., 0] + b * x[..., 1], c * x[..., 0] + d * x[..., 1]], axis=-1)

    def apply(self, x, direction=1):
        x = self.check_points(x)
        d = self._direction(direction)
        if d.ndim == 0:
            m = self.matrix if d > 0 else self.inverse
            return reduce_mod1(self._linear(m, x))
        forward = self._linear(self.matrix, x)
        backward = self._linear(self.inverse, x)
        return reduce_mod1(np.where((d > 0)[..., None], forward, backward))

    def leaf_direction(self, kind):
        self._check_leaf_kind(kind)
        return self.e_s if kind == "s" else self.e_u

    def leaf_flow(self, x, kind, t):
        x = self.check_points(x)
        e = self.leaf_direction(kind)
        t = np.asarray(t, dtype=np.float64)
        return reduce_mod1(x + t[..., None] * e)

    def leaf_multiplier(self, kind):
        self._check_leaf_kind(kind)
        return self.mu_s if kind == "s" else 1.0 / self.mu_u

    def connect_parameters(self, x, ys, K=2):
        """Leaf parameters (t, s) with x + t e_u + s e_s = y + k, for every lift k in [-K, K]^2.

        Returns shape (targets, (2K+1)^2, 2), each row ordered by |t| + |s|
        with ties broken lexicographically on (t, s).
        """
        if int(K) != K or K < 1:
            raise ConfigError(f"lift radius K must be a positive integer, got {K}")
        K = int(K)
        x = self.check_points(x)
        ys = self.check_points(ys).reshape(-1, 2)
        ks = np.arange(-K, K + 1)
        lifts = np.stack(np.meshgrid(ks, ks, indexing="ij"), axis=-1).reshape(-1, 2)
        inverse = np.linalg.inv(np.column_stack([self.e_u, self.e_s]))
        rhs = (ys - x)[:, None, :] + lifts[None]
        params = rhs @ inverse.T
        t, s = params[..., 0], params[..., 1]
        out = np.empty_like(params)
        for row in range(params.shape[0]):
            order = np.lexsort((s[row], t[row], np.abs(t[row]) + np.abs(s[row])))
            out[row] = params[row, order]
        return out

    def su_connect(self, x, y, K=2):
        """Two-segment path (u then s) from x to y, shortest over integer lifts in [-K, K]^2."""
        x = self.check_points(x)
        y = self.check_points(y)
        if x.shape != (2,) or y.shape != (2,):
            raise PointKindError("su_connect joins single torus points")
        t, s = self.connect_parameters(x, y, K)[0, 0]
        return SuPath(base=x.copy(), segments=(("u", float(t)), ("s", float(s))))

    def _period_matrix(self, n):
        power = ((1, 0), (0, 1))
        for _ in range(n):
            power = _int_matmul(power, self.matrix)
        return ((power[0][0] - 1, power[0][1]), (power[1][0], power[1][1] - 1))

    def _fixed_numerators(self, n):
        """Exact solutions of A^n v = v mod 1 as integer numerators over D = |det(A^n - I)|."""
        if int(n) != n or not 1 <= n <= MAX_PERIOD:
            raise PeriodRangeError(f"period must be an integer in [1, {MAX_PERIOD}], got {n}")
        (m00, m01), (m10, m11) = self._period_matrix(int(n))
        det = m00 * m11 - m01 * m10
        D = abs(det)
        # column Hermite form [[g, 0], [*, D/g]] of the lattice M Z^2
        g, _, _ = _extended_gcd(m00, m01)
        i, j = np.meshgrid(np.arange(g, dtype=np.int64), np.arange(D // g, dtype=np.int64), indexing="ij")
        k0, k1 = i.ravel(), j.ravel()
        sign = 1 if det > 0 else -1
        num0 = np.mod(sign * (m11 * k0 - m01 * k1), D)
        num1 = np.mod(sign * (-m10 * k0 + m00 * k1), D)
        nums = np.stack([num0, num1], axis=-1)
        nums = nums[np.lexsort((nums[:, 1], nums[:, 0]))]
        return nums, D

    def _step_numerators(self, nums, D):
        (a, b), (c, d) = self.matrix
        return np.stack(
            [np.mod(a * nums[:, 0] + b * nums[:, 1], D), np.mod(c * nums[:, 0] + d * nums[:, 1], D)],
            axis=-1,
        )

    def periodic_points(self, n):
        """All points with f^n x = x, sorted lexicographically."""
        nums, D = self._fixed_numerators(n)
        logger.debug("period %d: %d points (D=%d)", n, len(nums), D)
        return nums.astype(np.float64) / D

    def periodic_orbits(self, n):
        """Orbits of minimal period n as an array of shape (orbits, n, 2).

        Each orbit starts at its lexicographically smallest point; iteration
        is carried out on exact integer numerators.
        """
        nums, D = self._fixed_numerators(n)
        n = int(n)
        path = [nums]
        for _ in range(n - 1):
            path.append(self._step_numerators(path[-1], D))
        codes = np.stack([p[:, 0] * D + p[:, 1] for p in path], axis=1)
        primitive = np.all(codes[:, 1:] != codes[:, :1], axis=1)
        canonical = primitive & (codes[:, 0] == codes.min(axis=1))
        orbit_nums = np.stack(path, axis=1)[canonical]
        return orbit_nums.astype(np.float64) / D

    def mu_quadrature(self, resolution=256):
        return midpoint_quadrature(self.kind, resolution)

    def mu_sample(self, rng, size=None):
        if size is None:
            return rng.random(2)
        return rng.random((size, 2))

    def distance(self, x, y):
        return np.linalg.norm(torus_delta(x, y), axis=-1)

    def cell_index(self, x, cells_per_axis=64):
        x = self.check_points(x)
        ij = np.minimum((x * cells_per_axis).astype(np.int64), cells_per_axis - 1)
        return ij[..., 0] * cells_per_axis + ij[..., 1]

    def n_cells(self, cells_per_axis=64):
        return cells_per_axis * cells_per_axis

    def describe(self):
        return {"kind": self.kind, "matrix": [list(row) for row in self.matrix]}
