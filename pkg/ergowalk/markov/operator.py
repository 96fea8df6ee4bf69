"""Environment Markov operator P and its dual P*.

On a grid, node i sends the fraction p(x_i) of its mass to the
interpolation neighbours of f(x_i) and q(x_i) to those of f^-1(x_i).  The
resulting matrix T is row-stochastic; P acts as ``T @ psi`` and P* moves
masses ``m = w * rho`` as ``T.T @ m``, so the discrete pair is exactly dual.
"""

import numpy as np
from scipy import sparse

from ergowalk.cohomology.observables import Observable
from ergowalk.errors import GridAlignmentError, UnsupportedStructureError
from ergowalk.markov.density import DensityField


class MarkovOperator:
    def __init__(self, system, profile, quadrature):
        if system.kind not in ("rotation", "cat"):
            raise UnsupportedStructureError(f"no grid operator for the {system.kind} system")
        if quadrature.kind != system.kind:
            raise GridAlignmentError(f"{quadrature.kind} grid used with a {system.kind} system")
        self.system = system
        self.profile = profile
        self.quadrature = quadrature
        nodes = quadrature.nodes
        n = quadrature.size
        p = np.asarray(profile.p(nodes), dtype=np.float64)
        q = np.asarray(profile.q(nodes), dtype=np.float64)
        fwd_cols, fwd_w = quadrature.stencil(system.apply(nodes, 1))
        bwd_cols, bwd_w = quadrature.stencil(system.apply(nodes, -1))
        cols = np.concatenate([fwd_cols, bwd_cols], axis=1)
        data = np.concatenate([p[:, None] * fwd_w, q[:, None] * bwd_w], axis=1)
        rows = np.repeat(np.arange(n), cols.shape[1])
        self.matrix = sparse.csr_matrix((data.ravel(), (rows, cols.ravel())), shape=(n, n))
        self.matrix.sum_duplicates()
        self.adjoint = self.matrix.T.tocsr()

    def apply(self, values):
        return self.matrix @ np.asarray(values, dtype=np.float64)

    def push(self, mass):
        return self.adjoint @ mass

    def apply_star(self, density):
        density.check_aligned(self.quadrature)
        w = self.quadrature.weights
        return DensityField.from_values(self.quadrature, self.push(w * density.values) / w)

    def residual(self, density):
        w = self.quadrature.weights
        mass = w * density.values
        return float(np.sum(np.abs(self.push(mass) - mass)))


def pointwise_P(system, profile, psi, x):
    """p(x) psi(f x) + q(x) psi(f^-1 x) for an evaluable psi."""
    return profile.p(x) * psi(system.apply(x, 1)) + profile.q(x) * psi(system.apply(x, -1))


def apply_P(system, profile, psi, x=None, quadrature=None, operator=None):
    """Markov operator on an observable (at points or grid nodes) or on grid values."""
    if isinstance(psi, Observable) or callable(psi):
        if x is None:
            if quadrature is None:
                if operator is None:
                    raise GridAlignmentError("apply_P needs points, a quadrature or an operator")
                quadrature = operator.quadrature
            x = quadrature.nodes
        return pointwise_P(system, profile, psi, x)
    values = np.asarray(psi, dtype=np.float64)
    if operator is None:
        if quadrature is None:
            raise GridAlignmentError("grid values need the quadrature they live on")
        operator = MarkovOperator(system, profile, quadrature)
    if values.shape[0] != operator.quadrature.size:
        raise GridAlignmentError(
            f"grid values of length {values.shape[0]} on a grid of {operator.quadrature.size} nodes"
        )
    return operator.apply(values)


def apply_P_star(system, profile, rho, operator=None):
    if operator is None:
        operator = MarkovOperator(system, profile, rho.quadrature)
    return operator.apply_star(rho)
