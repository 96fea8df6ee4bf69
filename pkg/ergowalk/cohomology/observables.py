"""Evaluable scalar fields carrying Hoelder metadata.

Hoelder data ``(beta, H)`` bounds ``|obs(x) - obs(y)| <= H d^beta`` with
``d`` the leaf parameter (coordinate) distance.  ``provenance`` is
``"exact"`` when H comes from a derivative bound and ``"estimated"`` when
it comes from sampled difference quotients.
"""

import math

import numpy as np

from ergowalk.errors import ConfigError, MissingHolderDataError

ESTIMATE_SAFETY = 1.5
GEODESIC_DISTORTION = 2.0


class Observable:
    holder_exponent = None
    holder_constant = None
    provenance = "exact"

    def __call__(self, x):
        return self.evaluate(x)

    def evaluate(self, x):
        raise NotImplementedError

    @property
    def holder(self):
        if self.holder_exponent is None or self.holder_constant is None:
            return None
        return (self.holder_exponent, self.holder_constant)

    def require_holder(self):
        if self.holder is None:
            raise MissingHolderDataError(f"{type(self).__name__} carries no Hoelder data")
        return self.holder

    def describe(self):
        return {"type": type(self).__name__, "holder": self.holder, "provenance": self.provenance}

    def __add__(self, other):
        return LinearCombination.of(self, 1.0, other, 1.0)

    def __radd__(self, other):
        return LinearCombination.of(self, 1.0, other, 1.0)

    def __sub__(self, other):
        return LinearCombination.of(self, 1.0, other, -1.0)

    def __rsub__(self, other):
        return LinearCombination.of(self, -1.0, other, 1.0)

    def __neg__(self):
        return LinearCombination([(-1.0, self)])

    def __mul__(self, scalar):
        if not np.isscalar(scalar):
            return NotImplemented
        return LinearCombination([(float(scalar), self)])

    __rmul__ = __mul__


class ConstantObservable(Observable):
    holder_exponent = 1.0
    holder_constant = 0.0

    def __init__(self, value, point_ndim=0):
        self.value = float(value)
        # trailing point dimensions: 0 circle, 1 torus, 2 frames
        self.point_ndim = point_ndim

    def evaluate(self, x):
        x = np.asarray(x, dtype=np.float64)
        shape = x.shape[: x.ndim - self.point_ndim]
        return np.full(shape, self.value)

    def describe(self):
        return {**super().describe(), "value": self.value}


class LinearCombination(Observable):
    def __init__(self, terms, const=0.0):
        self.terms = [(float(c), obs) for c, obs in terms]
        self.const = float(const)
        holders = [obs.holder for _, obs in self.terms]
        if all(h is not None for h in holders):
            # valid for leaf distances <= 1 when exponents differ
            self.holder_exponent = min((h[0] for h in holders), default=1.0)
            self.holder_constant = sum(abs(c) * h[1] for (c, _), h in zip(self.terms, holders))
        if any(obs.provenance != "exact" for _, obs in self.terms):
            self.provenance = "estimated"

    @classmethod
    def of(cls, a, ca, b, cb):
        if np.isscalar(b):
            return cls([(ca, a)], const=cb * float(b))
        if not isinstance(b, Observable):
            return NotImplemented
        return cls([(ca, a), (cb, b)])

    def evaluate(self, x):
        out = None
        for c, obs in self.terms:
            v = c * obs(x)
            out = v if out is None else out + v
        return out + self.const

    def describe(self):
        return {
            **super().describe(),
            "const": self.const,
            "terms": [{"coef": c, "observable": obs.describe()} for c, obs in self.terms],
        }


class TrigObservable(Observable):
    """const + sum_j a_j cos(2 pi k_j.x) + b_j sin(2 pi k_j.x) on the circle or torus."""

    holder_exponent = 1.0

    def __init__(self, dim, wavevectors, cos_coeffs, sin_coeffs, const=0.0):
        if dim not in (1, 2):
            raise ConfigError(f"trigonometric observables live on the circle or torus, got dim={dim}")
        k = np.asarray(wavevectors, dtype=np.int64).reshape(-1, dim)
        a = np.asarray(cos_coeffs, dtype=np.float64).reshape(-1)
        b = np.asarray(sin_coeffs, dtype=np.float64).reshape(-1)
        if not k.shape[0] == a.shape[0] == b.shape[0]:
            raise ConfigError("wavevectors and coefficient arrays must have equal length")
        self.dim = dim
        self.wavevectors = k
        self.cos_coeffs = a
        self.sin_coeffs = b
        self.const = float(const)
        self.holder_constant = float(
            np.sum(2.0 * math.pi * np.linalg.norm(k, axis=1) * np.hypot(a, b))
        )

    @classmethod
    def from_terms(cls, dim, terms, const=0.0):
        """Build from ``[{"k": [1, 0], "cos": a, "sin": b}, ...]``."""
        ks, a, b = [], [], []
        for term in terms:
            k = term.get("k")
            if k is None:
                raise ConfigError(f"trigonometric term without wavevector: {term!r}")
            ks.append(np.atleast_1d(k))
            a.append(term.get("cos", 0.0))
            b.append(term.get("sin", 0.0))
        if not ks:
            return cls(dim, np.zeros((0, dim)), [], [], const)
        return cls(dim, np.stack(ks), a, b, const)

    @classmethod
    def cosine(cls, dim, k, amplitude=1.0):
        return cls(dim, [k], [amplitude], [0.0])

    @classmethod
    def sine(cls, dim, k, amplitude=1.0):
        return cls(dim, [k], [0.0], [amplitude])

    def _phase(self, x):
        x = np.asarray(x, dtype=np.float64)
        if self.dim == 1:
            return 2.0 * math.pi * x[..., None] * self.wavevectors[:, 0]
        return 2.0 * math.pi * (x @ self.wavevectors.T.astype(np.float64))

    def evaluate(self, x):
        phase = self._phase(x)
        return self.const + np.cos(phase) @ self.cos_coeffs + np.sin(phase) @ self.sin_coeffs

    @property
    def mean(self):
        zero = np.all(self.wavevectors == 0, axis=1)
        return self.const + float(np.sum(self.cos_coeffs[zero]))

    def fourier_coefficients(self):
        """Complex coefficients {k: c_k} of the circle expansion sum c_k e^{2 pi i k x}."""
        if self.dim != 1:
            raise ConfigError("Fourier coefficients are provided for circle observables only")
        coeffs = {0: complex(self.mean)}
        for k, a, b in zip(self.wavevectors[:, 0], self.cos_coeffs, self.sin_coeffs):
            k = int(k)
            if k == 0:
                continue
            coeffs[k] = coeffs.get(k, 0j) + complex(a, -b) / 2.0
            coeffs[-k] = coeffs.get(-k, 0j) + complex(a, b) / 2.0
        return coeffs

    def describe(self):
        return {
            **super().describe(),
            "const": self.const,
            "terms": [
                {"k": k.tolist(), "cos": float(a), "sin": float(b)}
                for k, a, b in zip(self.wavevectors, self.cos_coeffs, self.sin_coeffs)
            ],
        }


class GridObservable(Observable):
    """Node values on a quadrature grid with periodic (bi)linear interpolation."""

    holder_exponent = 1.0

    def __init__(self, quadrature, values):
        values = np.array(values, dtype=np.float64).reshape(-1)
        if values.shape[0] != quadrature.size:
            raise ConfigError(f"grid observable needs {quadrature.size} values, got {values.shape[0]}")
        values.setflags(write=False)
        self.quadrature = quadrature
        self.values = values
        n = quadrature.resolution
        grid = values.reshape(quadrature.grid_shape)
        # Lipschitz constant of the interpolant
        if grid.ndim == 1:
            self.holder_constant = float(np.max(np.abs(np.roll(grid, -1) - grid)) * n)
        else:
            gx = np.max(np.abs(np.roll(grid, -1, axis=0) - grid))
            gy = np.max(np.abs(np.roll(grid, -1, axis=1) - grid))
            self.holder_constant = float(math.hypot(gx, gy) * n)

    def evaluate(self, x):
        return self.quadrature.interpolate(self.values, x)

    def describe(self):
        return {**super().describe(), "resolution": self.quadrature.resolution}


class FunctionObservable(Observable):
    """Wraps a vectorised callable; Hoelder data optional."""

    def __init__(self, fn, holder=None, provenance="estimated", name=None):
        self.fn = fn
        self.name = name or getattr(fn, "__name__", "function")
        if holder is not None:
            self.holder_exponent, self.holder_constant = float(holder[0]), float(holder[1])
        self.provenance = provenance

    def evaluate(self, x):
        return np.asarray(self.fn(x), dtype=np.float64)

    def describe(self):
        return {**super().describe(), "name": self.name}


class CoboundaryObservable(Observable):
    """u o f - u for a transfer function u."""

    def __init__(self, system, u):
        self.system = system
        self.u = u
        if u.holder is not None:
            beta, h = u.holder
            self.holder_exponent = beta
            self.holder_constant = h * (system.lipschitz + 1.0)
        self.provenance = u.provenance

    def evaluate(self, x):
        return self.u(self.system.apply(x, 1)) - self.u(x)

    def describe(self):
        return {**super().describe(), "transfer": self.u.describe()}


def estimate_holder(system, obs, rng, pairs=1000, scale=0.1):
    """Sampled Lipschitz quotient along leaves (circle: along the rotation direction).

    Returns ``(1.0, H)`` with H the largest quotient times a safety factor
    (a distortion factor 2 on the geodesic model).
    """
    x = system.mu_sample(rng, pairs)
    t = rng.uniform(-scale, scale, size=pairs)
    t = np.where(np.abs(t) < 1e-6, 1e-6, t)
    if system.kind == "rotation":
        y = x + t
        y = y - np.floor(y)
        quotients = np.abs(obs(y) - obs(x)) / np.abs(t)
    else:
        kinds = rng.random(pairs) < 0.5
        y = np.where(
            kinds.reshape((-1,) + (1,) * len(system.point_shape)),
            system.leaf_flow(x, "s", t),
            system.leaf_flow(x, "u", t),
        )
        quotients = np.abs(obs(y) - obs(x)) / np.abs(t)
    factor = GEODESIC_DISTORTION if system.kind == "geodesic" else ESTIMATE_SAFETY
    return 1.0, float(np.max(quotients) * factor)
