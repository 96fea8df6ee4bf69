import numpy as np
from gymnasium import spaces

from ergowalk.cohomology.observables import TrigObservable
from ergowalk.dynamics.rotation import GOLDEN_ANGLE, Rotation
from ergowalk.envs.base_env import QuenchedWalkEnv
from ergowalk.markov.profile import constant_profile, make_profile_from_transfer


class RotationWalk(QuenchedWalkEnv):
    """Walk driven by a circle rotation; default profile from u = 0.3 cos 2 pi x."""

    def __init__(self, alpha=GOLDEN_ANGLE, p=None, amplitude=0.3, profile=None, **kwargs):
        system = Rotation(alpha)
        if profile is None:
            if p is not None:
                profile = constant_profile(system, p)
            else:
                profile = make_profile_from_transfer(system, TrigObservable.cosine(1, 1, amplitude))
        super().__init__(system, profile, **kwargs)

    def _observation_space(self):
        return spaces.Box(low=0.0, high=1.0, shape=(1,), dtype=np.float64)
