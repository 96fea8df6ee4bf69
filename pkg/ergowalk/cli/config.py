"""Experiment configuration: a JSON document validated into frozen dataclasses.

Top-level keys: ``system``, ``profile``, ``scenario``, ``numerics``, ``mc``
and ``seed``.  Unknown keys and wrong types raise ConfigError; the
effective configuration (defaults filled in) is echoed into the manifest.
"""

import json
from dataclasses import asdict, dataclass, field, fields
from typing import Optional

from ergowalk.errors import ConfigError

TOP_LEVEL_KEYS = ("system", "profile", "scenario", "numerics", "mc", "seed")

SYSTEM_PARAMETERS = {
    "rotation": ("alpha", "allow_rational"),
    "cat": ("matrix",),
    "geodesic": (),
}

PROFILE_PARAMETERS = {
    "constant": ("p",),
    "trig": ("log_phi",),
    "transfer": ("u",),
    "grid": ("resolution", "values"),
}

BUMP_PARAMETERS = ("amplitude", "width", "center_distance", "center_angle", "word_radius", "cutoff_widths", "seed")

# scenario -> (allowed systems, option defaults)
SCENARIOS = {
    "stationary": (("rotation", "cat"), {"oracle_tolerance": None}),
    "obstruction": (
        ("cat",),
        {"max_period": 6, "loops": 100, "loop_low": 0.1, "loop_high": 0.4, "degeneracy_iterations": 10_000},
    ),
    "transfer": (("rotation", "cat"), {"points": 1000, "samples": 10_000, "modes": 64,
                                       "denom_floor": 1e-6, "lifts": 2}),
    "walks": (("rotation", "cat", "geodesic"), {"start": "mu", "return_threshold": 0.98,
                                                "dump_steps": False}),
    "clt": (("rotation", "cat"), {"psi": None, "ks_threshold": 0.03}),
    "balance": (("cat", "geodesic"), {"simulate": False, "samples": 200_000}),
    "geodesic-loops": (("geodesic",), {"loops": 20, "segments": 6, "scale": 0.5}),
}


def _check_type(name, value, types):
    if isinstance(value, bool) and bool not in types:
        raise ConfigError(f"{name} must be {' or '.join(t.__name__ for t in types)}, got {value!r}")
    if not isinstance(value, types):
        raise ConfigError(f"{name} must be {' or '.join(t.__name__ for t in types)}, got {value!r}")
    return value


def _check_keys(name, mapping, allowed):
    unknown = sorted(set(mapping) - set(allowed))
    if unknown:
        raise ConfigError(f"unknown key(s) in {name}: {', '.join(unknown)}")


@dataclass(frozen=True)
class SystemConfig:
    kind: str
    parameters: dict = field(default_factory=dict)


@dataclass(frozen=True)
class ProfileConfig:
    kind: str
    parameters: dict = field(default_factory=dict)


@dataclass(frozen=True)
class ScenarioConfig:
    name: str
    options: dict = field(default_factory=dict)


@dataclass(frozen=True)
class NumericsConfig:
    grid: Optional[int] = None
    tolerance: float = 1e-10
    iterations: int = 100_000
    cesaro_window: int = 64
    degeneracy_ratio: float = 100.0
    functional_tolerance: float = 1e-10
    stationarity_tolerance: float = 1e-8


@dataclass(frozen=True)
class MonteCarloConfig:
    walks: int = 1000
    length: int = 10_000
    stride: int = 32
    cells: int = 64


@dataclass(frozen=True)
class RunConfig:
    system: SystemConfig
    profile: ProfileConfig
    scenario: ScenarioConfig
    numerics: NumericsConfig = NumericsConfig()
    mc: MonteCarloConfig = MonteCarloConfig()
    seed: int = 0

    def to_record(self):
        return asdict(self)


def _parse_system(raw):
    _check_type("system", raw, (dict,))
    _check_keys("system", raw, ("kind", "parameters"))
    kind = _check_type("system.kind", raw.get("kind"), (str,))
    if kind not in SYSTEM_PARAMETERS:
        raise ConfigError(f"Unsupported system kind: {kind}")
    params = _check_type("system.parameters", raw.get("parameters", {}), (dict,))
    _check_keys("system.parameters", params, SYSTEM_PARAMETERS[kind])
    if "alpha" in params:
        _check_type("system.parameters.alpha", params["alpha"], (int, float))
    if "matrix" in params:
        _check_type("system.parameters.matrix", params["matrix"], (list,))
    return SystemConfig(kind, dict(params))


def _check_terms(name, terms):
    _check_type(name, terms, (list,))
    for i, term in enumerate(terms):
        _check_type(f"{name}[{i}]", term, (dict,))
        _check_keys(f"{name}[{i}]", term, ("k", "cos", "sin"))
        if "k" not in term:
            raise ConfigError(f"{name}[{i}] has no wavevector 'k'")
        _check_type(f"{name}[{i}].k", term["k"], (int, list))
        for coef in ("cos", "sin"):
            if coef in term:
                _check_type(f"{name}[{i}].{coef}", term[coef], (int, float))


def check_trig(name, spec):
    _check_type(name, spec, (dict,))
    _check_keys(name, spec, ("terms", "const"))
    _check_terms(f"{name}.terms", spec.get("terms", []))
    _check_type(f"{name}.const", spec.get("const", 0.0), (int, float))


def _parse_profile(raw, system):
    _check_type("profile", raw, (dict,))
    _check_keys("profile", raw, ("kind", "parameters"))
    kind = _check_type("profile.kind", raw.get("kind"), (str,))
    if kind not in PROFILE_PARAMETERS:
        raise ConfigError(f"Unsupported profile kind: {kind}")
    params = _check_type("profile.parameters", raw.get("parameters", {}), (dict,))
    _check_keys("profile.parameters", params, PROFILE_PARAMETERS[kind])
    if kind == "constant":
        _check_type("profile.parameters.p", params.get("p"), (int, float))
    elif kind == "trig":
        if system.kind == "geodesic":
            raise ConfigError("trigonometric profiles live on the circle or torus")
        check_trig("profile.parameters.log_phi", params.get("log_phi"))
    elif kind == "transfer":
        u = _check_type("profile.parameters.u", params.get("u"), (dict,))
        if system.kind == "geodesic":
            _check_keys("profile.parameters.u", u, ("bump",))
            bump = _check_type("profile.parameters.u.bump", u.get("bump", {}), (dict,))
            _check_keys("profile.parameters.u.bump", bump, BUMP_PARAMETERS)
            for key, value in bump.items():
                _check_type(f"profile.parameters.u.bump.{key}", value, (int, float))
        else:
            check_trig("profile.parameters.u", u)
    elif kind == "grid":
        if system.kind == "geodesic":
            raise ConfigError("grid profiles need a quadrature grid")
        _check_type("profile.parameters.resolution", params.get("resolution"), (int,))
        _check_type("profile.parameters.values", params.get("values"), (list,))
    return ProfileConfig(kind, dict(params))


def _parse_scenario(raw, system):
    if isinstance(raw, str):
        raw = {"name": raw}
    _check_type("scenario", raw, (dict,))
    name = _check_type("scenario.name", raw.get("name"), (str,))
    if name not in SCENARIOS:
        raise ConfigError(f"Unsupported scenario: {name}")
    systems, defaults = SCENARIOS[name]
    if system.kind not in systems:
        raise ConfigError(f"scenario {name} runs on {', '.join(systems)}, not {system.kind}")
    options = {k: v for k, v in raw.items() if k != "name"}
    _check_keys(f"scenario {name}", options, defaults)
    for key, default in defaults.items():
        if default is not None and key in options:
            expected = (int, float) if isinstance(default, float) else (type(default),)
            _check_type(f"scenario.{key}", options[key], expected)
    if name == "walks" and options.get("start", "mu") not in ("mu", "nu"):
        raise ConfigError(f"walk starts are 'mu' or 'nu', got {options['start']!r}")
    if options.get("oracle_tolerance") is not None:
        _check_type("scenario.oracle_tolerance", options["oracle_tolerance"], (int, float))
    if name == "clt" and options.get("psi") is not None:
        check_trig("scenario.psi", options["psi"])
    return ScenarioConfig(name, {**defaults, **options})


def _parse_section(name, raw, cls):
    _check_type(name, raw, (dict,))
    allowed = [f.name for f in fields(cls)]
    _check_keys(name, raw, allowed)
    defaults = cls()
    values = {}
    for key, value in raw.items():
        default = getattr(defaults, key)
        if isinstance(default, float):
            _check_type(f"{name}.{key}", value, (int, float))
            value = float(value)
        else:
            _check_type(f"{name}.{key}", value, (int,))
            if value < 1:
                raise ConfigError(f"{name}.{key} must be positive, got {value}")
        values[key] = value
    return cls(**values)


def parse_config(raw, seed=None):
    """Validate a decoded JSON document; ``seed`` overrides the document's seed."""
    _check_type("config", raw, (dict,))
    _check_keys("config", raw, TOP_LEVEL_KEYS)
    for key in ("system", "profile", "scenario"):
        if key not in raw:
            raise ConfigError(f"config has no '{key}' section")
    system = _parse_system(raw["system"])
    profile = _parse_profile(raw["profile"], system)
    scenario = _parse_scenario(raw["scenario"], system)
    numerics = _parse_section("numerics", raw.get("numerics", {}), NumericsConfig)
    mc = _parse_section("mc", raw.get("mc", {}), MonteCarloConfig)
    if seed is None:
        seed = raw.get("seed", 0)
    seed = _check_type("seed", seed, (int,))
    if seed < 0:
        raise ConfigError(f"seed must be nonnegative, got {seed}")
    return RunConfig(system, profile, scenario, numerics, mc, seed)


def load_config(path, seed=None):
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    return parse_config(raw, seed)
