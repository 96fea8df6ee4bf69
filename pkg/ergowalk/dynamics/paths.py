from dataclasses import dataclass, field

import numpy as np

from ergowalk.errors import ConfigError, LoopNotClosedError

LOOP_TOLERANCE = 1e-10


@dataclass(frozen=True)
class SuPath:
    """Base point plus ordered leaf segments ``(kind, t)`` with kind in {'s', 'u'}."""

    base: np.ndarray
    segments: tuple = field(default_factory=tuple)

    def __post_init__(self):
        segs = []
        for kind, t in self.segments:
            if kind not in ("s", "u"):
                raise ConfigError(f"segment kind must be 's' or 'u', got {kind!r}")
            segs.append((kind, float(t)))
        object.__setattr__(self, "segments", tuple(segs))
        base = np.array(self.base, dtype=np.float64)
        base.setflags(write=False)
        object.__setattr__(self, "base", base)

    def __len__(self):
        return len(self.segments)

    @property
    def kinds(self):
        return tuple(kind for kind, _ in self.segments)

    @property
    def parameters(self):
        return np.array([t for _, t in self.segments], dtype=np.float64)

    def vertices(self, system):
        """Points x_0 = base, x_1, ..., x_N obtained by sequential leaf flows."""
        points = [self.base]
        for kind, t in self.segments:
            points.append(system.leaf_flow(points[-1], kind, t))
        return points

    def endpoint(self, system):
        return self.vertices(system)[-1]

    def reversed(self, system):
        segs = tuple((kind, -t) for kind, t in reversed(self.segments))
        return SuPath(base=self.endpoint(system), segments=segs)


@dataclass(frozen=True)
class SuLoop(SuPath):
    """A closed su-path; construct through :meth:`close`."""

    closure_defect: float = 0.0

    @classmethod
    def close(cls, system, path, tol=LOOP_TOLERANCE):
        defect = float(system.distance(path.endpoint(system), path.base))
        if not defect <= tol:
            raise LoopNotClosedError(
                f"path endpoint misses its base by {defect:.3e} (tolerance {tol:.1e})"
            )
        return cls(base=path.base, segments=path.segments, closure_defect=defect)

    def reversed(self, system):
        segs = tuple((kind, -t) for kind, t in reversed(self.segments))
        return SuLoop(base=self.base, segments=segs, closure_defect=self.closure_defect)

    def concat(self, system, other, tol=LOOP_TOLERANCE):
        if float(system.distance(self.base, other.base)) > tol:
            raise LoopNotClosedError("loops must share their base point to be concatenated")
        return SuLoop(
            base=self.base,
            segments=self.segments + other.segments,
            closure_defect=self.closure_defect + other.closure_defect,
        )
