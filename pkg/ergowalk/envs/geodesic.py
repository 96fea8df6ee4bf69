import numpy as np
from gymnasium import spaces

from ergowalk.dynamics.geodesic import GeodesicFlow
from ergowalk.envs.base_env import QuenchedWalkEnv
from ergowalk.geodesic.bump import BumpObservable
from ergowalk.markov.profile import constant_profile, make_profile_from_transfer


class GeodesicWalk(QuenchedWalkEnv):
    """Walk driven by the time-one geodesic map of a genus-2 surface.

    Without ``p`` the profile is built from a bump transfer function; the
    observation is the reduced frame as a 2x2 matrix.
    """

    def __init__(self, p=None, amplitude=0.3, word_radius=3, profile=None, **kwargs):
        system = GeodesicFlow()
        if profile is None:
            if p is not None:
                profile = constant_profile(system, p)
            else:
                u = BumpObservable(amplitude=amplitude, word_radius=word_radius, group=system.group)
                profile = make_profile_from_transfer(system, u)
        super().__init__(system, profile, **kwargs)

    def _observation_space(self):
        return spaces.Box(low=-np.inf, high=np.inf, shape=(2, 2), dtype=np.float64)
