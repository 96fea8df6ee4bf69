import numpy as np
from gymnasium import spaces

from ergowalk.cohomology.observables import TrigObservable
from ergowalk.dynamics.cat import DEFAULT_MATRIX, CatMap
from ergowalk.envs.base_env import QuenchedWalkEnv
from ergowalk.markov.profile import constant_profile, make_profile_from_transfer


def default_transfer(amplitude=0.2):
    """u = a (cos 2 pi x + sin 2 pi y)."""
    return TrigObservable(2, [[1, 0], [0, 1]], [amplitude, 0.0], [0.0, amplitude])


class CatWalk(QuenchedWalkEnv):
    def __init__(self, matrix=DEFAULT_MATRIX, p=None, amplitude=0.2, profile=None, **kwargs):
        system = CatMap(matrix)
        if profile is None:
            if p is not None:
                profile = constant_profile(system, p)
            else:
                profile = make_profile_from_transfer(system, default_transfer(amplitude))
        super().__init__(system, profile, **kwargs)

    def _observation_space(self):
        return spaces.Box(low=0.0, high=1.0, shape=(2,), dtype=np.float64)
