"""Genus-2 surface group acting on PSL(2, R) by left multiplication.

Matrices act on the upper half plane by Moebius transformations; the base
point of a frame ``g`` is ``g . i``.  For unit-determinant ``g`` the
hyperbolic distance from ``g . i`` to ``i`` satisfies
``cosh d = |g|_F^2 / 2``, which is what the reduction descends on.
"""

import functools
import logging
import math

import numpy as np

from ergowalk.errors import ConfigError, ReductionError

logger = logging.getLogger(__name__)

MAX_REDUCTION_STEPS = 10_000
RELATION_ORDER = (0, 3, 6, 1, 4, 7, 2, 5)


def mul2(a, b):
    """Broadcasting 2x2 product written out entrywise (no BLAS dispatch)."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    shape = np.broadcast_shapes(a.shape, b.shape)
    out = np.empty(shape, dtype=np.float64)
    out[..., 0, 0] = a[..., 0, 0] * b[..., 0, 0] + a[..., 0, 1] * b[..., 1, 0]
    out[..., 0, 1] = a[..., 0, 0] * b[..., 0, 1] + a[..., 0, 1] * b[..., 1, 1]
    out[..., 1, 0] = a[..., 1, 0] * b[..., 0, 0] + a[..., 1, 1] * b[..., 1, 0]
    out[..., 1, 1] = a[..., 1, 0] * b[..., 0, 1] + a[..., 1, 1] * b[..., 1, 1]
    return out


def det2(g):
    g = np.asarray(g, dtype=np.float64)
    return g[..., 0, 0] * g[..., 1, 1] - g[..., 0, 1] * g[..., 1, 0]


def frobenius2(g):
    g = np.asarray(g, dtype=np.float64)
    return np.sum(g * g, axis=(-2, -1))


def rotation(phi):
    """K-element fixing i; rotates the disk model by 2*phi."""
    phi = np.asarray(phi, dtype=np.float64)
    c, s = np.cos(phi), np.sin(phi)
    out = np.empty(phi.shape + (2, 2))
    out[..., 0, 0] = c
    out[..., 0, 1] = s
    out[..., 1, 0] = -s
    out[..., 1, 1] = c
    return out


def translation(r):
    """diag(e^{r/2}, e^{-r/2}): moves i a hyperbolic distance r."""
    r = np.asarray(r, dtype=np.float64)
    out = np.zeros(r.shape + (2, 2))
    out[..., 0, 0] = np.exp(r / 2.0)
    out[..., 1, 1] = np.exp(-r / 2.0)
    return out


def normalize_sign(g):
    """Representative in PSL(2, R): largest-magnitude entry of the first column positive."""
    g = np.array(g, dtype=np.float64)
    col = g[..., :, 0]
    pick = np.take_along_axis(col, np.argmax(np.abs(col), axis=-1)[..., None], axis=-1)[..., 0]
    sign = np.where(pick < 0, -1.0, 1.0)
    return g * sign[..., None, None]


def hyperbolic_distance_to_origin(g):
    return np.arccosh(np.maximum(frobenius2(g) / 2.0, 1.0))


class SurfaceGroup:
    """Side pairings of the regular octagon with vertex angle pi/4.

    Generator ``k`` translates the octagon centre across side ``k``;
    generator ``(k + 4) % 8`` is its inverse.  The defining relation is the
    vertex-cycle word ``g0 g3 g6 g1 g4 g7 g2 g5 = +-I``.
    """

    n_sides = 8

    def __init__(self, validate=True):
        # inradius and circumradius of the regular octagon with angles pi/4
        self.cosh_inradius = 1.0 / math.tan(math.pi / 8.0)
        self.inradius = math.acosh(self.cosh_inradius)
        self.cosh_circumradius = self.cosh_inradius**2
        self.circumradius = math.acosh(self.cosh_circumradius)
        self.half_side = math.atanh(math.tan(math.pi / 8.0) * math.sinh(self.inradius))

        angles = np.arange(self.n_sides) * math.pi / 8.0
        self.generators = mul2(
            mul2(rotation(angles), translation(np.full(self.n_sides, 2.0 * self.inradius))),
            rotation(-angles),
        )
        self.generators.setflags(write=False)
        self.relation_defect = None
        if validate:
            self.validate()

    @staticmethod
    def inverse_index(k):
        return (k + 4) % 8

    def word_matrix(self, word):
        g = np.eye(2)
        for k in word:
            g = mul2(g, self.generators[k])
        return g

    def side_frames(self, side, samples=16):
        """Frames whose base points run along side ``side`` of the octagon."""
        s = np.linspace(-0.99, 0.99, samples) * self.half_side
        prefix = mul2(rotation(side * math.pi / 8.0), translation(self.inradius))
        return mul2(mul2(prefix, rotation(math.pi / 4.0)), translation(s))

    def validate(self, tol=1e-9):
        dets = det2(self.generators)
        traces = np.abs(self.generators[:, 0, 0] + self.generators[:, 1, 1])
        if np.max(np.abs(dets - 1.0)) > 1e-12 or np.any(traces <= 2.0):
            raise ConfigError("surface group generators must be hyperbolic with determinant 1")

        word = self.word_matrix(RELATION_ORDER)
        defect = min(np.max(np.abs(word - np.eye(2))), np.max(np.abs(word + np.eye(2))))
        if defect > tol:
            raise ConfigError(f"surface group relation fails: defect {defect:.3e}")
        self.relation_defect = float(defect)

        for k in range(self.n_sides):
            opposite = self.side_frames(self.inverse_index(k))
            if not np.all(self.contains(opposite, tol=tol)):
                raise ConfigError(f"side {self.inverse_index(k)} samples leave the octagon")
            image = mul2(self.generators[k], opposite)
            if not np.all(self.contains(image, tol=tol)):
                raise ConfigError(f"generator {k} does not map side {self.inverse_index(k)} onto the boundary")
            # image of the centre must lie in the adjacent copy, not in the octagon
            if self.contains(self.generators[k][None], tol=tol)[0]:
                raise ConfigError(f"generator {k} overlaps the fundamental octagon")
        logger.debug("surface group validated, relation defect %.3e", defect)

    def contains(self, g, tol=1e-12):
        """Whether base points lie in the closed fundamental octagon."""
        g = np.asarray(g, dtype=np.float64)
        cost = frobenius2(g)
        cand = frobenius2(mul2(self.generators.reshape((8,) + (1,) * (g.ndim - 2) + (2, 2)), g[None]))
        return np.all(cand >= cost[None] - tol * np.maximum(cost[None], 1.0), axis=0)

    def reduce(self, g, return_words=False, max_steps=MAX_REDUCTION_STEPS):
        """Greedy fundamental-domain representative of the coset ``Gamma g``.

        Left-multiplies by whichever generator most decreases the distance of
        the base point to the origin until none does.  With ``return_words``
        the applied generator indices are returned as well.
        """
        g = np.array(g, dtype=np.float64)
        single = g.ndim == 2
        if single:
            g = g[None]
        batch_shape = g.shape[:-2]
        g = g.reshape(-1, 2, 2)
        m = g.shape[0]
        cost = frobenius2(g)
        words = [[] for _ in range(m)] if return_words else None
        active = np.arange(m)
        for _ in range(max_steps):
            if active.size == 0:
                break
            cand = mul2(self.generators[:, None], g[active][None])
            cand_cost = frobenius2(cand)
            best = np.argmin(cand_cost, axis=0)
            cols = np.arange(active.size)
            best_cost = cand_cost[best, cols]
            improve = best_cost < cost[active] * (1.0 - 1e-12)
            moved = active[improve]
            g[moved] = cand[best[improve], cols[improve]]
            cost[moved] = best_cost[improve]
            if words is not None:
                for i, k in zip(moved, best[improve]):
                    words[i].append(int(k))
            active = moved
        if active.size:
            raise ReductionError(
                f"reduction did not terminate within {max_steps} steps for {active.size} frames"
            )
        g = normalize_sign(g).reshape(batch_shape + (2, 2))
        if single:
            g = g[0]
            words = words[0] if words is not None else None
        if return_words:
            return g, words
        return g


@functools.lru_cache(maxsize=None)
def default_group():
    return SurfaceGroup()
