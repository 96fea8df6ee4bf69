import math
from dataclasses import dataclass

import numpy as np

from ergowalk.errors import ConfigError, PointKindError
from ergowalk.geodesic.group import (
    default_group,
    det2,
    frobenius2,
    mul2,
    normalize_sign,
    rotation,
    translation,
)

FRAME_DET_TOL = 1e-10
GEODESIC_STEP = 1.0


def upper_unipotent(t):
    """u(t) = [[1, t], [0, 1]]; stable under the time-one map."""
    t = np.asarray(t, dtype=np.float64)
    out = np.zeros(t.shape + (2, 2))
    out[..., 0, 0] = 1.0
    out[..., 1, 1] = 1.0
    out[..., 0, 1] = t
    return out


def lower_unipotent(r):
    """l(r) = [[1, 0], [r, 1]]; unstable under the time-one map."""
    r = np.asarray(r, dtype=np.float64)
    out = np.zeros(r.shape + (2, 2))
    out[..., 0, 0] = 1.0
    out[..., 1, 1] = 1.0
    out[..., 1, 0] = r
    return out


def leaf_matrix(kind, t):
    if kind == "s":
        return upper_unipotent(t)
    if kind == "u":
        return lower_unipotent(t)
    raise ConfigError(f"leaf kind must be 's' or 'u', got {kind!r}")


def as_matrix(x):
    if isinstance(x, Frame):
        return x.matrix
    g = np.asarray(x, dtype=np.float64)
    if g.ndim < 2 or g.shape[-2:] != (2, 2):
        raise PointKindError(f"frames are 2x2 matrices, got array of shape {g.shape}")
    return g


def _wrap_like(x, g, group):
    if isinstance(x, Frame):
        return Frame(g, reduced=group is not None)
    return g


def upper_half_point(g):
    g = as_matrix(g)
    return (g[..., 0, 0] * 1j + g[..., 0, 1]) / (g[..., 1, 0] * 1j + g[..., 1, 1])


def disk_point(g):
    z = upper_half_point(g)
    return (z - 1j) / (z + 1j)


@dataclass(frozen=True)
class Frame:
    """Unit-determinant 2x2 matrix representing a point of the unit tangent bundle."""

    matrix: np.ndarray
    reduced: bool = False

    def __post_init__(self):
        g = np.array(self.matrix, dtype=np.float64)
        if g.shape != (2, 2):
            raise PointKindError(f"a frame is a single 2x2 matrix, got shape {g.shape}")
        det = float(det2(g))
        if abs(det - 1.0) > FRAME_DET_TOL:
            raise PointKindError(f"frame determinant {det!r} is not 1")
        g.setflags(write=False)
        object.__setattr__(self, "matrix", g)

    @property
    def base_point(self):
        return complex(disk_point(self.matrix))

    @classmethod
    def identity(cls):
        return cls(np.eye(2), reduced=True)


def geodesic_apply(x, direction=1, group=None):
    """Time-one geodesic map x -> x diag(e^{+-1/2}, e^{-+1/2}), reduced by ``group``."""
    g = as_matrix(x)
    d = np.asarray(direction, dtype=np.float64)
    if not np.all(np.abs(d) == 1):
        raise ConfigError(f"direction must be +1 or -1, got {direction!r}")
    half = 0.5 * GEODESIC_STEP * d
    out = np.empty(np.broadcast_shapes(g.shape, d.shape + (2, 2)))
    # right multiplication by a diagonal matrix scales columns
    out[..., :, 0] = g[..., :, 0] * np.exp(half)[..., None]
    out[..., :, 1] = g[..., :, 1] * np.exp(-half)[..., None]
    if group is not None:
        out = group.reduce(out)
    return _wrap_like(x, out, group)


def geodesic_leaf_flow(x, kind, t, group=None):
    """Horocycle flow: right multiplication by u(t) (kind 's') or l(t) (kind 'u')."""
    g = as_matrix(x)
    out = mul2(g, leaf_matrix(kind, t))
    if group is not None:
        out = group.reduce(out)
    return _wrap_like(x, out, group)


def haar_sample(group=None, rng=None, size=None):
    """Haar-distributed frames on the quotient.

    Draws Cartan coordinates ``k(a) translation(r) k(b)`` with the radial
    density proportional to sinh r on the circumscribed ball, and keeps the
    samples whose base point falls in the fundamental octagon.
    """
    group = group or default_group()
    if rng is None:
        raise ConfigError("haar_sample needs an explicit generator")
    n = 1 if size is None else int(size)
    batches = []
    have = 0
    while have < n:
        m = 2 * (n - have) + 16
        u = rng.random((m, 3))
        r = np.arccosh(1.0 + u[:, 0] * (group.cosh_circumradius - 1.0))
        g = mul2(mul2(rotation(math.pi * u[:, 1]), translation(r)), rotation(math.pi * u[:, 2]))
        keep = group.contains(g)
        batches.append(g[keep])
        have += int(keep.sum())
    g = normalize_sign(np.concatenate(batches)[:n])
    return g[0] if size is None else g


def distance_to_origin(x):
    return np.arccosh(np.maximum(frobenius2(as_matrix(x)) / 2.0, 1.0))
