"""Binary dump of step arrays.

Layout: a 64-byte little-endian header followed by one row of packed step
bits per walk (bit set for a +1 step, least significant bit first).

    magic    4s   b"EWLK"
    version  u4
    n_steps  u8
    seed     u8   master seed (0 when unseeded)
    n_walks  u8
    first    u8   walk index of the first row
    padding  24x
"""

import struct

import numpy as np

from ergowalk.errors import ConfigError
from ergowalk.walk.simulate import WalkEnsemble

MAGIC = b"EWLK"
VERSION = 1
HEADER = struct.Struct("<4sIQQQQ24x")

assert HEADER.size == 64


def _rows(samples):
    if isinstance(samples, WalkEnsemble):
        first = int(samples.indices[0]) if samples.indices is not None else 0
        return samples.packed_steps, samples.n_steps, samples.master_seed, first
    samples = list(samples)
    if not samples:
        raise ConfigError("nothing to export")
    n_steps = samples[0].n_steps
    if any(s.n_steps != n_steps for s in samples):
        raise ConfigError("walks of different length cannot share a dump")
    seed = samples[0].seed
    return (
        np.stack([s.packed_steps for s in samples]),
        n_steps,
        None if seed is None else seed[0],
        0 if seed is None else seed[1],
    )


def write_steps(path, samples):
    packed, n_steps, seed, first = _rows(samples)
    with open(path, "wb") as fh:
        fh.write(HEADER.pack(MAGIC, VERSION, n_steps, int(seed or 0), packed.shape[0], first))
        fh.write(np.ascontiguousarray(packed, dtype=np.uint8).tobytes())


def read_steps(path):
    """Return (header dict, steps) with steps of shape (walks, n_steps) in {-1, +1}."""
    with open(path, "rb") as fh:
        raw = fh.read()
    if len(raw) < HEADER.size:
        raise ConfigError(f"{path}: truncated header")
    magic, version, n_steps, seed, n_walks, first = HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise ConfigError(f"{path}: bad magic {magic!r}")
    if version != VERSION:
        raise ConfigError(f"{path}: unsupported version {version}")
    width = (n_steps + 7) // 8
    body = np.frombuffer(raw, dtype=np.uint8, offset=HEADER.size)
    if body.size != n_walks * width:
        raise ConfigError(f"{path}: expected {n_walks * width} payload bytes, found {body.size}")
    bits = np.unpackbits(body.reshape(n_walks, width), axis=1, count=n_steps, bitorder="little")
    header = {"version": version, "n_steps": n_steps, "seed": seed, "n_walks": n_walks, "first_index": first}
    return header, bits.astype(np.int8) * 2 - 1


def summary_header():
    return ["seed", "walk_index", "final_position", "min_position", "max_position",
            "first_return", "censored", "cell_coverage"]


def summary_rows(samples):
    if isinstance(samples, WalkEnsemble):
        samples = list(samples)
    rows = []
    for s in samples:
        seed, index = s.seed if s.seed is not None else ("", "")
        rows.append([seed, index, s.final_position, s.min_position, s.max_position,
                     s.first_return, int(s.censored), s.cell_coverage])
    return rows
