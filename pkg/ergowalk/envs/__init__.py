import importlib

from gymnasium.envs.registration import register

SYSTEM_NAMES = [
    "Rotation",
    "Cat",
    "Geodesic",
]


def create_walk_env(system, **kwargs):
    """
    Single factory for every Ergowalk-<System>-v0 env.
      - system:  one of the strings in SYSTEM_NAMES
      - **kwargs are forwarded to the env constructor (profile, max_steps, ...)
    """
    if system not in SYSTEM_NAMES:
        raise ValueError(f"Unsupported system in the ergowalk set: {system}")
    module = importlib.import_module(f"ergowalk.envs.{system.lower()}")
    return getattr(module, f"{system}Walk")(**kwargs)


# register every Ergowalk-<System>-v0 with the factory, passing
# `system=<System>`; user kwargs (p=0.5, max_steps=...) go on top.
for system in SYSTEM_NAMES:
    register(
        id=f"Ergowalk-{system}-v0",
        entry_point="ergowalk.envs:create_walk_env",
        kwargs={"system": system},
    )
