import logging
import math

import numpy as np

from ergowalk.cohomology.observables import GEODESIC_DISTORTION, Observable
from ergowalk.errors import ConfigError
from ergowalk.geodesic.frames import (
    as_matrix,
    geodesic_leaf_flow,
    haar_sample,
)
from ergowalk.geodesic.group import (
    default_group,
    frobenius2,
    mul2,
    normalize_sign,
    rotation,
    translation,
)

logger = logging.getLogger(__name__)


def word_ball(group, radius):
    """Distinct group elements of word length <= radius (as PSL representatives)."""
    elements = np.eye(2)[None]
    frontier = elements
    for _ in range(radius):
        frontier = mul2(frontier[:, None], group.generators[None]).reshape(-1, 2, 2)
        frontier = normalize_sign(frontier)
        merged = np.concatenate([elements, frontier])
        keys = np.round(merged.reshape(-1, 4), 8)
        _, first = np.unique(keys, axis=0, return_index=True)
        first = np.sort(first)
        new = first[first >= elements.shape[0]]
        frontier = merged[new]
        elements = merged[first]
    return elements


class BumpObservable(Observable):
    """Gaussian bump in hyperbolic distance, averaged over a word ball of the surface group.

    The truncated average is only approximately invariant;
    ``non_invariance`` records the largest jump across a side pairing and
    bounds the extra error in telescoping checks.
    """

    provenance = "estimated"

    def __init__(
        self,
        amplitude=0.3,
        width=0.5,
        center_distance=0.8,
        center_angle=0.0,
        word_radius=4,
        cutoff_widths=8.0,
        group=None,
        seed=0,
    ):
        if width <= 0:
            raise ConfigError(f"bump width must be positive, got {width}")
        self.group = group or default_group()
        self.amplitude = float(amplitude)
        self.width = float(width)
        self.center_distance = float(center_distance)
        self.center_angle = float(center_angle)
        self.word_radius = int(word_radius)
        center = mul2(rotation(center_angle / 2.0), translation(center_distance))
        center_inv = np.array([[center[1, 1], -center[0, 1]], [-center[1, 0], center[0, 0]]])
        ball = word_ball(self.group, self.word_radius)
        shifted = mul2(center_inv[None], ball)
        reach = np.arccosh(np.maximum(frobenius2(shifted) / 2.0, 1.0))
        keep = reach <= self.group.circumradius + cutoff_widths * self.width
        self._shifted = shifted[keep]
        logger.debug("bump uses %d of %d ball elements", int(keep.sum()), ball.shape[0])

        rng = np.random.default_rng(seed)
        self.non_invariance = self._measure_non_invariance(rng)
        self.holder_exponent = 1.0
        self.holder_constant = self._estimate_lipschitz(rng)

    def raw(self, g):
        """Truncated group average at an unreduced frame."""
        g = as_matrix(g)
        flat = g.reshape(-1, 2, 2)
        out = np.empty(flat.shape[0])
        chunk = 2048
        for start in range(0, flat.shape[0], chunk):
            prod = mul2(self._shifted[None], flat[start : start + chunk, None])
            d = np.arccosh(np.maximum(frobenius2(prod) / 2.0, 1.0))
            out[start : start + chunk] = np.sum(np.exp(-(d * d) / (2.0 * self.width**2)), axis=1)
        return self.amplitude * out.reshape(g.shape[:-2])

    def evaluate(self, x):
        return self.raw(self.group.reduce(as_matrix(x)))

    def _measure_non_invariance(self, rng, samples=256):
        frames = [self.group.side_frames(k) for k in range(self.group.n_sides)]
        frames.append(haar_sample(self.group, rng, samples))
        frames = np.concatenate(frames)
        base = self.raw(frames)
        jumps = [np.max(np.abs(self.raw(mul2(gen, frames)) - base)) for gen in self.group.generators]
        return float(max(jumps))

    def _estimate_lipschitz(self, rng, pairs=1000, scale=0.05):
        x = haar_sample(self.group, rng, pairs)
        t = rng.uniform(-scale, scale, size=pairs)
        t = np.where(np.abs(t) < 1e-6, 1e-6, t)
        base = self.raw(x)
        quotient = 0.0
        for kind in ("s", "u"):
            moved = geodesic_leaf_flow(x, kind, t)
            quotient = max(quotient, float(np.max(np.abs(self.raw(moved) - base) / np.abs(t))))
        return GEODESIC_DISTORTION * quotient

    def describe(self):
        return {
            **super().describe(),
            "amplitude": self.amplitude,
            "width": self.width,
            "center_distance": self.center_distance,
            "center_angle": self.center_angle,
            "word_radius": self.word_radius,
            "non_invariance": self.non_invariance,
        }
