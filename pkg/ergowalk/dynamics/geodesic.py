import math

import numpy as np

from ergowalk.dynamics.base import DynamicalSystem
from ergowalk.errors import PointKindError, UnsupportedStructureError
from ergowalk.geodesic.frames import (
    as_matrix,
    disk_point,
    geodesic_apply,
    geodesic_leaf_flow,
    haar_sample,
)
from ergowalk.geodesic.group import SurfaceGroup, default_group, normalize_sign

ANGULAR_SECTORS = 8
RADIAL_BANDS = 8


class GeodesicFlow(DynamicalSystem):
    """Time-one geodesic map on the unit tangent bundle of a genus-2 surface."""

    kind = "geodesic"
    point_shape = (2, 2)

    def __init__(self, group=None, **kwargs):
        if group is None:
            group = default_group()
        if not isinstance(group, SurfaceGroup):
            raise PointKindError(f"geodesic system needs a SurfaceGroup, got {type(group).__name__}")
        self.group = group
        self.lambda_u = math.e
        self.lambda_s = math.exp(-1.0)
        self.contraction = self.lambda_s
        self.expansion = self.lambda_u
        self.lipschitz = math.e

    def check_points(self, x):
        return as_matrix(x)

    def apply(self, x, direction=1):
        return geodesic_apply(self.check_points(x), direction, self.group)

    def leaf_flow(self, x, kind, t):
        self._check_leaf_kind(kind)
        return geodesic_leaf_flow(self.check_points(x), kind, t, self.group)

    def leaf_multiplier(self, kind):
        self._check_leaf_kind(kind)
        return self.lambda_s

    def mu_quadrature(self, resolution=256):
        raise UnsupportedStructureError("the geodesic model is integrated by Monte-Carlo only")

    def mu_sample(self, rng, size=None):
        return haar_sample(self.group, rng, size)

    def distance(self, x, y):
        dx = normalize_sign(as_matrix(x)) - normalize_sign(as_matrix(y))
        return np.sqrt(np.sum(dx * dx, axis=(-2, -1)))

    def cell_index(self, x, cells_per_axis=64):
        """Sector x band partition of the octagon by the base point."""
        w = disk_point(self.check_points(x))
        sector = np.floor((np.angle(w) % (2 * math.pi)) / (2 * math.pi) * ANGULAR_SECTORS)
        outer = math.tanh(self.group.circumradius / 2.0)
        band = np.floor(np.abs(w) / outer * RADIAL_BANDS)
        sector = np.clip(sector, 0, ANGULAR_SECTORS - 1).astype(np.int64)
        band = np.clip(band, 0, RADIAL_BANDS - 1).astype(np.int64)
        return sector * RADIAL_BANDS + band

    def n_cells(self, cells_per_axis=64):
        return ANGULAR_SECTORS * RADIAL_BANDS

    def describe(self):
        return {"kind": self.kind, "genus": 2, "relation_defect": self.group.relation_defect}
