import pytest
import gymnasium
import ergowalk.envs  # this import triggers the register() calls

from gymnasium import Env
from gymnasium.spaces import Space

from ergowalk.envs import SYSTEM_NAMES, create_walk_env

# geodesic env built with a small word ball to keep construction cheap
MAKE_KWARGS = {
    "Rotation": {},
    "Cat": {},
    "Geodesic": {"word_radius": 2},
}


@pytest.mark.parametrize("system", SYSTEM_NAMES)
def test_gym_make_and_basic_api(system):
    env_id = f"Ergowalk-{system}-v0"

    env = gymnasium.make(env_id, **MAKE_KWARGS[system])
    assert isinstance(env, Env), f"{env_id} did not return a gymnasium.Env"

    assert env.spec is not None
    assert env.spec.id == env_id

    obs, info = env.reset(seed=0)
    assert isinstance(info, dict)
    assert info["position"] == 0
    assert env.observation_space.contains(obs)

    assert hasattr(env, "action_space"), "no action_space"
    assert isinstance(env.action_space, Space)

    action = env.action_space.sample()
    step_out = env.step(action)
    assert len(step_out) == 5
    new_obs, reward, terminated, truncated, info = step_out

    assert isinstance(info, dict)
    assert isinstance(terminated, bool)
    assert isinstance(truncated, bool)
    assert isinstance(reward, (int, float))
    assert reward in (-1.0, 1.0)
    assert info["position"] == reward

    env.close()


@pytest.mark.parametrize("system", SYSTEM_NAMES)
def test_truncation_at_max_steps(system):
    env = gymnasium.make(f"Ergowalk-{system}-v0", max_steps=5, **MAKE_KWARGS[system])
    env.reset(seed=1)
    truncated = False
    for n in range(5):
        _, _, terminated, truncated, _ = env.step(0)
        assert not terminated
    assert truncated
    env.close()


def test_constant_profile_kwarg():
    env = create_walk_env("Rotation", p=0.5)
    assert env.profile.is_constant
    assert env.profile.p_min == env.profile.p_max == 0.5


def test_unknown_system_rejected():
    with pytest.raises(ValueError):
        create_walk_env("Billiard")
