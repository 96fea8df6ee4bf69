import importlib

from ergowalk.dynamics.base import DynamicalSystem, Quadrature, reduce_mod1, torus_delta
from ergowalk.dynamics.paths import SuLoop, SuPath
from ergowalk.errors import ConfigError

# kind -> (module, class)
SYSTEM_KINDS = {
    "rotation": ("rotation", "Rotation"),
    "cat": ("cat", "CatMap"),
    "geodesic": ("geodesic", "GeodesicFlow"),
}


def create_system(kind, **kwargs):
    """Single factory for every driving system, keyed by its kind string."""
    if kind not in SYSTEM_KINDS:
        raise ConfigError(f"Unsupported system kind: {kind}")
    module_name, class_name = SYSTEM_KINDS[kind]
    module = importlib.import_module(f"ergowalk.dynamics.{module_name}")
    return getattr(module, class_name)(**kwargs)


__all__ = [
    "SYSTEM_KINDS",
    "DynamicalSystem",
    "Quadrature",
    "SuLoop",
    "SuPath",
    "create_system",
    "reduce_mod1",
    "torus_delta",
]
