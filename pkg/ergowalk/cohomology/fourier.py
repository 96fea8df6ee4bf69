"""Cohomological equation over a circle rotation, solved mode by mode.

``u(x + alpha) - u(x) = obs(x)`` gives ``u_k = obs_k / (e^{2 pi i k alpha} - 1)``
for ``k != 0``.  Modes whose denominator falls below the floor are flagged
and dropped; their coefficients join the truncation estimate.
"""

import logging
import math

import numpy as np

from ergowalk.cohomology.observables import Observable, TrigObservable
from ergowalk.errors import NotACoboundaryError, UnsupportedStructureError

logger = logging.getLogger(__name__)

MEAN_TOLERANCE = 1e-10
ROUNDOFF = 1e-12


def sampled_coefficients(obs, grid=1024):
    """Fourier coefficients of a circle observable from an FFT on ``grid`` points."""
    x = np.arange(grid) / grid
    c = np.fft.fft(obs(x)) / grid
    k = np.fft.fftfreq(grid, d=1.0 / grid).astype(np.int64)
    return {int(kk): complex(cc) for kk, cc in zip(k, c)}


class FourierTransfer(Observable):
    """Trigonometric transfer function with its construction metadata."""

    holder_exponent = 1.0

    def __init__(self, coefficients, flagged, truncation_estimate, K, denom_floor):
        self.coefficients = dict(sorted(coefficients.items()))
        self.flagged = sorted(flagged)
        self.truncation_estimate = float(truncation_estimate)
        self.K = K
        self.denom_floor = denom_floor
        self._k = np.array(list(self.coefficients), dtype=np.float64)
        self._c = np.array(list(self.coefficients.values()), dtype=np.complex128)
        self.holder_constant = float(np.sum(2.0 * math.pi * np.abs(self._k) * np.abs(self._c)))

    def evaluate(self, x):
        x = np.asarray(x, dtype=np.float64)
        if self._k.size == 0:
            return np.zeros(x.shape)
        phase = np.exp(2j * math.pi * x[..., None] * self._k)
        return np.real(phase @ self._c)

    def describe(self):
        return {
            **super().describe(),
            "K": self.K,
            "denom_floor": self.denom_floor,
            "flagged": self.flagged,
            "truncation_estimate": self.truncation_estimate,
            "coefficients": {str(k): [c.real, c.imag] for k, c in self.coefficients.items()},
        }


def fourier_transfer(system, obs, K=64, denom_floor=1e-6, grid=1024):
    """Solve u o f - u = obs on a rotation up to mode K.

    ``obs`` is a TrigObservable, a mapping ``{k: coefficient}`` or any circle
    observable (sampled by FFT on ``grid`` points).
    """
    if system.kind != "rotation":
        raise UnsupportedStructureError("the Fourier solver works over circle rotations")
    if isinstance(obs, TrigObservable):
        coeffs = obs.fourier_coefficients()
    elif isinstance(obs, dict):
        coeffs = {int(k): complex(v) for k, v in obs.items()}
    else:
        coeffs = sampled_coefficients(obs, max(grid, 4 * K))
    mean = coeffs.get(0, 0j)
    if abs(mean) > MEAN_TOLERANCE:
        raise NotACoboundaryError(f"observable has mean {mean.real:.6g}; only zero-mean data are coboundaries")

    solved, flagged, tail = {}, [], 0.0
    for k, c in coeffs.items():
        if k == 0 or c == 0:
            continue
        denom = np.exp(2j * math.pi * k * system.alpha) - 1.0
        if abs(k) > K:
            tail += abs(c)
        elif abs(denom) < denom_floor:
            flagged.append(k)
            tail += abs(c)
        else:
            solved[k] = c / denom
    if flagged:
        logger.warning("small denominators below %.1e at modes %s", denom_floor, flagged)
    estimate = tail + ROUNDOFF * (1.0 + sum(abs(c) for c in solved.values()))
    return FourierTransfer(solved, flagged, estimate, K, denom_floor)
