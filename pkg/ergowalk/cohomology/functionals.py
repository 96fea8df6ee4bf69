"""Segment and loop functionals along stable/unstable leaves.

A stable segment from x to x' = leaf_flow(x, 's', t) contributes
``sum_{n>=0} obs(f^n x) - obs(f^n x')``; an unstable one contributes
``-sum_{n>=1} obs(f^-n x) - obs(f^-n x')``.  Partner orbits are produced by
the leaf conjugation ``f^n x' = leaf_flow(f^n x, kind, c^n t)`` so pair
distances stay exact.  Series are truncated at the first N whose Hoelder
tail bound drops below ``tol``.
"""

import logging
import math

import numpy as np

from ergowalk.cohomology.report import OBSTRUCTION_MARGIN, ObstructionReport
from ergowalk.dynamics.paths import SuLoop
from ergowalk.errors import ConfigError

logger = logging.getLogger(__name__)

DEFAULT_TOLERANCE = 1e-10


def truncation_order(d, beta, H, lam, tol):
    """Return (N, bound) with bound = H d^beta lam^((N+1) beta) / (1 - lam^beta) <= tol."""
    if tol <= 0:
        raise ConfigError(f"truncation tolerance must be positive, got {tol}")
    d = float(d)
    if d == 0.0 or H == 0.0:
        return 0, 0.0
    geometric = 1.0 - lam**beta
    ratio = tol * geometric / (H * d**beta)
    n = max(0, math.ceil(math.log(ratio) / (beta * math.log(lam))))
    return n, tail_bound(d, beta, H, lam, n)


def tail_bound(d, beta, H, lam, n):
    return H * np.abs(d) ** beta * lam ** ((n + 1) * beta) / (1.0 - lam**beta)


def _batch(system, x, t):
    x = system.check_points(x)
    t = np.asarray(t, dtype=np.float64)
    pdim = len(system.point_shape)
    single = x.ndim == pdim and t.ndim == 0
    batch = np.broadcast_shapes(x.shape[: x.ndim - pdim], t.shape)
    xb = np.broadcast_to(x, batch + system.point_shape).reshape((-1,) + system.point_shape)
    tb = np.broadcast_to(t, batch).reshape(-1)
    return xb, tb, single, batch


def segment_terms(system, x, kind, t, obs, tol=DEFAULT_TOLERANCE):
    multiplier = system.leaf_multiplier(kind)
    beta, H = obs.require_holder()
    xb, tb, _, batch = _batch(system, x, t)
    lam = system.contraction
    n, _ = truncation_order(np.max(np.abs(tb), initial=0.0), beta, H, lam, tol)
    bounds = tail_bound(tb, beta, H, lam, n)
    values = np.zeros(tb.shape[0])
    base, scale = xb, tb
    if kind == "s":
        for _ in range(n + 1):
            values += obs(base) - obs(system.leaf_flow(base, "s", scale))
            base = system.apply(base, 1)
            scale = scale * multiplier
    else:
        for _ in range(n + 1):
            base = system.apply(base, -1)
            scale = scale * multiplier
            values -= obs(base) - obs(system.leaf_flow(base, "u", scale))
    return values.reshape(batch), bounds.reshape(batch), 2 * (n + 1)


def segment_functional(system, x, kind, t, obs, tol=DEFAULT_TOLERANCE):
    """F(C; x -> leaf_flow(x, kind, t))(obs) as ``(value, bound)``; batched over x and t."""
    _, _, single, _ = _batch(system, x, t)
    values, bounds, _ = segment_terms(system, x, kind, t, obs, tol)
    if single:
        return float(values), float(bounds)
    return values, bounds


def segment_endpoint(system, x, kind, t):
    return system.leaf_flow(x, kind, t)


def loop_functional(system, loop, obs, tol=DEFAULT_TOLERANCE):
    if not isinstance(loop, SuLoop):
        loop = SuLoop.close(system, loop)
    if len(loop) == 0:
        return 0.0, 0.0
    seg_tol = tol / len(loop)
    value, bound = 0.0, 0.0
    for start, (kind, t) in zip(loop.vertices(system), loop.segments):
        v, b = segment_functional(system, start, kind, t, obs, seg_tol)
        value += v
        bound += b
    return value, bound


def loop_functional_batch(system, bases, kinds, params, obs, tol=DEFAULT_TOLERANCE):
    """Loops sharing one segment pattern, vectorised over loops.

    ``bases`` has shape (m,) + point_shape and ``params`` shape (m, L).
    Returns (values, bounds, n_terms).
    """
    params = np.asarray(params, dtype=np.float64)
    seg_tol = tol / len(kinds)
    point = system.check_points(bases)
    values = np.zeros(params.shape[0])
    bounds = np.zeros(params.shape[0])
    terms = 0
    for i, kind in enumerate(kinds):
        v, b, n = segment_terms(system, point, kind, params[:, i], obs, seg_tol)
        values += v
        bounds += b
        terms += n
        point = system.leaf_flow(point, kind, params[:, i])
    return values, bounds, terms


def random_quadrilaterals(system, count, rng, low=0.1, high=0.4):
    """Linear quadrilaterals (t e_u, s e_s, -t e_u, -s e_s) at mu-random bases."""
    bases = system.mu_sample(rng, count)
    t = rng.uniform(low, high, size=count) * rng.choice([-1.0, 1.0], size=count)
    s = rng.uniform(low, high, size=count) * rng.choice([-1.0, 1.0], size=count)
    return [
        SuLoop.close(system, SuLoop(base=b, segments=(("u", ti), ("s", si), ("u", -ti), ("s", -si))))
        for b, ti, si in zip(bases, t, s)
    ]


def loop_sweep(system, loops, obs, tol=DEFAULT_TOLERANCE, margin=OBSTRUCTION_MARGIN, allowance_per_segment=0.0):
    """ObstructionReport over a list of loops; loops sharing a pattern are vectorised.

    ``allowance_per_segment`` widens each loop's margin once per segment, for
    observables that are only approximately invariant on a quotient.
    """
    report = ObstructionReport(source="loops")
    groups = {}
    for index, loop in enumerate(loops):
        groups.setdefault(loop.kinds, []).append(index)
    results = {}
    for kinds, indices in groups.items():
        bases = np.stack([loops[i].base for i in indices])
        params = np.stack([loops[i].parameters for i in indices])
        values, bounds, _ = loop_functional_batch(system, bases, kinds, params, obs, tol)
        for i, v, b in zip(indices, values, bounds):
            results[i] = (v, b, len(kinds))
    for index in range(len(loops)):
        v, b, segments = results[index]
        report.add(f"loop-{index}", v, b, margin + allowance_per_segment * segments)
    report.metadata.update(
        {"count": len(loops), "tol": tol, "margin": margin, "allowance_per_segment": allowance_per_segment}
    )
    logger.info("loop sweep over %d loops: verdict %s", len(loops), report.verdict)
    return report
