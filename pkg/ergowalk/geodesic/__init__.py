from ergowalk.geodesic.frames import (
    Frame,
    geodesic_apply,
    geodesic_leaf_flow,
    haar_sample,
    lower_unipotent,
    upper_unipotent,
)
from ergowalk.geodesic.group import SurfaceGroup, default_group
