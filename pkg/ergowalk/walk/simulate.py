"""Quenched walks: X_{n+1} = +1 with probability p(omega_n), omega_{n+1} = f^{X_{n+1}} omega_n.

The environment is carried as a point, so memory grows with the number of
stored states, not with the range of the walk.  Walks are simulated in
vectorised batches; every walk draws its uniforms from its own stream.
"""

import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ergowalk.errors import ConfigError
from ergowalk.walk.rng import START, walk_stream

logger = logging.getLogger(__name__)

DEFAULT_STRIDE = 32
DEFAULT_CELLS = 64
UNIFORMS_PER_BATCH = 1 << 21


def step_kernel(system, profile, omega, uniforms):
    steps = np.where(uniforms < profile.p(omega), 1, -1).astype(np.int64)
    return steps, system.apply(omega, steps)


@dataclass(frozen=True)
class WalkSample:
    """One quenched walk: packed steps, summary of S and strided environment states."""

    x0: np.ndarray
    n_steps: int
    packed_steps: np.ndarray
    states: np.ndarray
    stride: int
    final_position: int
    min_position: int
    max_position: int
    first_return: int
    visited_cells: int
    n_cells: int
    seed: Optional[tuple] = None
    checkpoints: tuple = ()
    observable_sums: Optional[np.ndarray] = None

    @property
    def steps(self):
        bits = np.unpackbits(self.packed_steps, count=self.n_steps, bitorder="little")
        return bits.astype(np.int8) * 2 - 1

    @property
    def positions(self):
        return np.concatenate([[0], np.cumsum(self.steps, dtype=np.int64)])

    @property
    def returned(self):
        return self.first_return >= 0

    @property
    def censored(self):
        return not self.returned

    @property
    def sign_coverage(self):
        return self.min_position < 0 < self.max_position

    @property
    def distinct_sites(self):
        return self.max_position - self.min_position + 1

    @property
    def cell_coverage(self):
        return self.visited_cells / self.n_cells

    @property
    def coverage_efficiency(self):
        return self.visited_cells / min(self.n_cells, self.distinct_sites)

    def state_at(self, k):
        if k % self.stride:
            raise ConfigError(f"state {k} is not stored (stride {self.stride})")
        return self.states[k // self.stride]

    def birkhoff_averages(self):
        if self.observable_sums is None:
            raise ConfigError("walk was simulated without an observable")
        return self.observable_sums / np.asarray(self.checkpoints, dtype=np.float64)


@dataclass
class WalkEnsemble:
    """Batch of walks stored as arrays, ordered by walk index."""

    x0: np.ndarray
    n_steps: int
    stride: int
    n_cells: int
    packed_steps: np.ndarray
    states: np.ndarray
    final_position: np.ndarray
    min_position: np.ndarray
    max_position: np.ndarray
    first_return: np.ndarray
    visited_cells: np.ndarray
    master_seed: Optional[int] = None
    indices: Optional[np.ndarray] = None
    checkpoints: tuple = ()
    observable_sums: Optional[np.ndarray] = field(default=None)

    def __len__(self):
        return self.final_position.shape[0]

    def __getitem__(self, i):
        seed = None
        if self.master_seed is not None:
            seed = (self.master_seed, int(self.indices[i]))
        return WalkSample(
            x0=self.x0[i],
            n_steps=self.n_steps,
            packed_steps=self.packed_steps[i],
            states=self.states[i],
            stride=self.stride,
            final_position=int(self.final_position[i]),
            min_position=int(self.min_position[i]),
            max_position=int(self.max_position[i]),
            first_return=int(self.first_return[i]),
            visited_cells=int(self.visited_cells[i]),
            n_cells=self.n_cells,
            seed=seed,
            checkpoints=self.checkpoints,
            observable_sums=None if self.observable_sums is None else self.observable_sums[i],
        )

    def __iter__(self):
        return (self[i] for i in range(len(self)))

    def steps(self):
        bits = np.unpackbits(self.packed_steps, axis=1, count=self.n_steps, bitorder="little")
        return bits.astype(np.int8) * 2 - 1

    @property
    def returned(self):
        return self.first_return >= 0

    @property
    def sign_coverage(self):
        return (self.min_position < 0) & (self.max_position > 0)

    @property
    def distinct_sites(self):
        return self.max_position - self.min_position + 1

    @property
    def cell_coverage(self):
        return self.visited_cells / self.n_cells

    @property
    def coverage_efficiency(self):
        return self.visited_cells / np.minimum(self.n_cells, self.distinct_sites)

    def birkhoff_averages(self):
        if self.observable_sums is None:
            raise ConfigError("ensemble was simulated without an observable")
        return self.observable_sums / np.asarray(self.checkpoints, dtype=np.float64)

    @classmethod
    def concatenate(cls, parts):
        first = parts[0]

        def cat(name):
            values = [getattr(p, name) for p in parts]
            return None if values[0] is None else np.concatenate(values)

        return cls(
            x0=cat("x0"),
            n_steps=first.n_steps,
            stride=first.stride,
            n_cells=first.n_cells,
            packed_steps=cat("packed_steps"),
            states=cat("states"),
            final_position=cat("final_position"),
            min_position=cat("min_position"),
            max_position=cat("max_position"),
            first_return=cat("first_return"),
            visited_cells=cat("visited_cells"),
            master_seed=first.master_seed,
            indices=cat("indices"),
            checkpoints=first.checkpoints,
            observable_sums=cat("observable_sums"),
        )


def _check_checkpoints(checkpoints, n_steps):
    points = tuple(sorted({int(c) for c in checkpoints if 1 <= int(c) <= n_steps}))
    return points


def run_walks(system, profile, starts, n_steps, generators, stride=DEFAULT_STRIDE,
              cells_per_axis=DEFAULT_CELLS, observable=None, checkpoints=()):
    """Vectorised engine behind every simulator; one generator per walk."""
    if int(n_steps) != n_steps or n_steps < 1:
        raise ConfigError(f"walk length must be a positive integer, got {n_steps}")
    if int(stride) != stride or stride < 1:
        raise ConfigError(f"state stride must be a positive integer, got {stride}")
    n_steps, stride = int(n_steps), int(stride)
    omega = np.array(system.check_points(starts), dtype=np.float64)
    m = len(generators)
    if omega.shape[0] != m:
        raise ConfigError(f"{omega.shape[0]} start points for {m} generators")
    x0 = omega.copy()
    rows = np.arange(m)
    position = np.zeros(m, dtype=np.int64)
    low = np.zeros(m, dtype=np.int64)
    high = np.zeros(m, dtype=np.int64)
    first_return = np.full(m, -1, dtype=np.int64)
    n_cells = system.n_cells(cells_per_axis)
    visited = np.zeros((m, n_cells), dtype=bool)
    visited[rows, system.cell_index(omega, cells_per_axis)] = True
    packed = np.zeros((m, (n_steps + 7) // 8), dtype=np.uint8)
    states = np.empty((m, n_steps // stride + 1) + omega.shape[1:])
    states[:, 0] = omega

    checkpoints = _check_checkpoints(checkpoints, n_steps) if observable is not None else ()
    sums = np.zeros((m, len(checkpoints))) if observable is not None else None
    acc = np.zeros(m)
    next_cp = 0

    block = max(8, min(4096, (UNIFORMS_PER_BATCH // max(m, 1)) // 8 * 8))
    k = 0
    while k < n_steps:
        b = min(block, n_steps - k)
        uniforms = np.stack([g.random(b) for g in generators]) if m else np.zeros((0, b))
        bits = np.empty((m, b), dtype=bool)
        for j in range(b):
            if observable is not None:
                acc += observable(omega)
            steps, omega = step_kernel(system, profile, omega, uniforms[:, j])
            bits[:, j] = steps > 0
            position += steps
            k += 1
            np.minimum(low, position, out=low)
            np.maximum(high, position, out=high)
            first_return[(position == 0) & (first_return < 0)] = k
            visited[rows, system.cell_index(omega, cells_per_axis)] = True
            if k % stride == 0:
                states[:, k // stride] = omega
            if next_cp < len(checkpoints) and k == checkpoints[next_cp]:
                sums[:, next_cp] = acc
                next_cp += 1
        start = (k - b) // 8
        packed[:, start : start + (b + 7) // 8] = np.packbits(bits, axis=1, bitorder="little")

    return WalkEnsemble(
        x0=x0,
        n_steps=n_steps,
        stride=stride,
        n_cells=n_cells,
        packed_steps=packed,
        states=states,
        final_position=position,
        min_position=low,
        max_position=high,
        first_return=first_return,
        visited_cells=visited.sum(axis=1),
        checkpoints=checkpoints,
        observable_sums=sums,
    )


def simulate_quenched(system, profile, x, n_steps, rng, stride=DEFAULT_STRIDE,
                      cells_per_axis=DEFAULT_CELLS, observable=None, checkpoints=()):
    """Sample one walk from the quenched law at x, drawing from ``rng``."""
    x = system.check_points(x)
    ensemble = run_walks(
        system, profile, x[None], n_steps, [rng], stride, cells_per_axis, observable, checkpoints
    )
    return ensemble[0]


def default_threads():
    env = os.environ.get("ERGOWALK_THREADS")
    if env:
        try:
            threads = int(env)
        except ValueError as exc:
            raise ConfigError(f"ERGOWALK_THREADS must be an integer, got {env!r}") from exc
        if threads < 1:
            raise ConfigError(f"ERGOWALK_THREADS must be positive, got {threads}")
        return threads
    return os.cpu_count() or 1


def simulate_ensemble(system, profile, n_walks, n_steps, master_seed, starts=None, start_sampler=None,
                      stride=DEFAULT_STRIDE, cells_per_axis=DEFAULT_CELLS, observable=None,
                      checkpoints=(), threads=1, first_index=0):
    """Walks ``first_index .. first_index + n_walks - 1`` of the stream family ``master_seed``.

    Start points come from ``starts``, else from ``start_sampler(rng)`` on each
    walk's start stream, else from the invariant volume.  Results do not
    depend on ``threads``.
    """
    if int(n_walks) != n_walks or n_walks < 1:
        raise ConfigError(f"number of walks must be a positive integer, got {n_walks}")
    n_walks = int(n_walks)
    indices = np.arange(first_index, first_index + n_walks)
    if starts is None:
        sampler = start_sampler or (lambda rng: system.mu_sample(rng))
        starts = np.stack([sampler(walk_stream(master_seed, i, START)) for i in indices])
    starts = system.check_points(starts)
    if starts.shape[0] != n_walks:
        raise ConfigError(f"{starts.shape[0]} start points for {n_walks} walks")

    threads = max(1, int(threads or 1))
    chunk = math.ceil(n_walks / threads)
    bounds = [(lo, min(lo + chunk, n_walks)) for lo in range(0, n_walks, chunk)]

    def run(lo_hi):
        lo, hi = lo_hi
        gens = [walk_stream(master_seed, i) for i in indices[lo:hi]]
        part = run_walks(system, profile, starts[lo:hi], n_steps, gens, stride,
                         cells_per_axis, observable, checkpoints)
        part.indices = indices[lo:hi]
        part.master_seed = int(master_seed)
        return part

    logger.info("simulating %d walks of %d steps on %d thread(s)", n_walks, n_steps, len(bounds))
    if len(bounds) == 1:
        parts = [run(bounds[0])]
    else:
        with ThreadPoolExecutor(max_workers=len(bounds)) as pool:
            parts = list(pool.map(run, bounds))
    return WalkEnsemble.concatenate(parts)
