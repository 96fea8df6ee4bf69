import gymnasium as gym
import numpy as np
from gymnasium import spaces

from ergowalk.walk.simulate import step_kernel

DEFAULT_MAX_STEPS = 10_000


class QuenchedWalkEnv(gym.Env):
    """One quenched walk per episode.

    The observation is the environment state omega_n, the reward the step
    X_{n+1} and ``info["position"]`` the position S_n.  The single action
    only advances the walk.  Steps draw from ``self.np_random`` through the
    same kernel as ``simulate_quenched``, so a seeded episode reproduces
    the batch simulator's trajectory.
    """

    metadata = {"render_modes": []}

    def __init__(self, system, profile, max_steps=DEFAULT_MAX_STEPS, **kwargs):
        super().__init__()
        self.system = system
        self.profile = profile
        self.max_steps = int(max_steps)
        self.action_space = spaces.Discrete(1)
        self.observation_space = self._observation_space()
        self._omega = None
        self.position = 0
        self.n = 0

    def _observation_space(self):
        # override per system
        raise NotImplementedError

    def reset(self, *, seed=None, options=None):
        super().reset(seed=seed)
        options = options or {}
        if options.get("x") is not None:
            x = self.system.check_points(options["x"])
        else:
            x = self.system.mu_sample(self.np_random)
        self._omega = np.array(x, dtype=np.float64)[None]
        self.position = 0
        self.n = 0
        return self._get_obs(), {"position": self.position}

    def step(self, action):
        if self._omega is None:
            raise RuntimeError("call reset() before step()")
        uniforms = np.array([self.np_random.random()])
        steps, self._omega = step_kernel(self.system, self.profile, self._omega, uniforms)
        x = int(steps[0])
        self.position += x
        self.n += 1
        truncated = self.n >= self.max_steps
        return (
            self._get_obs(),
            float(x),
            False,
            truncated,
            {"position": self.position},
        )

    def _get_obs(self):
        return self._omega[0].reshape(self.observation_space.shape).copy()
