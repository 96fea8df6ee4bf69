import numpy as np
import pytest

from ergowalk.cohomology import TrigObservable
from ergowalk.dynamics import create_system
from ergowalk.errors import ConfigError, GridAlignmentError, PreconditionError, ProfileClampError
from ergowalk.markov import (
    DensityField,
    MarkovOperator,
    apply_P,
    apply_P_star,
    constant_profile,
    grid_profile,
    l2_contraction,
    make_profile_from_transfer,
    profile_from_log_phi,
    self_adjointness_defect,
    stationarity_residual,
    stationary_iterate,
    symmetry_defect,
    transfer_density_identity,
)
from ergowalk.markov.stationary import require_stationary

# (system kind, grid resolution, transfer function)
TRANSFER_CASES = [
    ("rotation", 1024, TrigObservable.cosine(1, 1, 0.3)),
    ("cat", 64, TrigObservable(2, [[1, 0], [0, 1]], [0.2, 0.0], [0.0, 0.2])),
]


def _transfer_case(kind, resolution, u):
    system = create_system(kind)
    profile = make_profile_from_transfer(system, u)
    quad = system.mu_quadrature(resolution)
    return system, profile, quad


@pytest.mark.parametrize("kind,resolution,u", TRANSFER_CASES)
def test_operator_rows_are_stochastic(kind, resolution, u):
    system, profile, quad = _transfer_case(kind, resolution, u)
    op = MarkovOperator(system, profile, quad)
    assert np.allclose(np.asarray(op.matrix.sum(axis=1)).ravel(), 1.0, atol=1e-14)
    assert np.allclose(op.apply(np.ones(quad.size)), 1.0, atol=1e-14)


@pytest.mark.parametrize("kind,resolution,u", TRANSFER_CASES)
def test_operator_duality(kind, resolution, u):
    system, profile, quad = _transfer_case(kind, resolution, u)
    op = MarkovOperator(system, profile, quad)
    rng = np.random.default_rng(0)
    for _ in range(100):
        psi = rng.standard_normal(quad.size)
        rho = DensityField.from_values(quad, rng.random(quad.size) + 0.1)
        left = quad.integrate(apply_P(system, profile, psi, operator=op) * rho.values)
        right = quad.integrate(psi * apply_P_star(system, profile, rho, operator=op).values)
        assert abs(left - right) <= 1e-10


def test_apply_P_pointwise_matches_grid_at_nodes():
    system, profile, quad = _transfer_case(*TRANSFER_CASES[0])
    psi = TrigObservable.cosine(1, 2)
    pointwise = apply_P(system, profile, psi, quadrature=quad)
    expected = profile.p(quad.nodes) * psi(system.apply(quad.nodes, 1)) + profile.q(quad.nodes) * psi(
        system.apply(quad.nodes, -1)
    )
    assert np.allclose(pointwise, expected, atol=1e-15)
    with pytest.raises(GridAlignmentError):
        apply_P(system, profile, np.ones(quad.size))


def test_operator_rejects_geodesic_and_misaligned_grids():
    cat = create_system("cat")
    with pytest.raises(GridAlignmentError):
        MarkovOperator(cat, constant_profile(cat, 0.5), create_system("rotation").mu_quadrature(64))
    rot = create_system("rotation")
    density = DensityField.uniform(rot.mu_quadrature(64))
    with pytest.raises(GridAlignmentError):
        density.check_aligned(rot.mu_quadrature(128))


@pytest.mark.parametrize("kind,resolution,u", TRANSFER_CASES)
def test_closed_form_density_is_stationary(kind, resolution, u):
    system, profile, quad = _transfer_case(kind, resolution, u)
    density = DensityField.from_function(quad, profile.closed_form_density())
    assert density.mass == pytest.approx(1.0, abs=1e-12)
    assert stationarity_residual(system, profile, density) <= 1e-12
    assert require_stationary(system, profile, density) <= 1e-8


@pytest.mark.parametrize("kind,resolution,u", TRANSFER_CASES)
def test_transfer_profile_is_symmetric(kind, resolution, u):
    system, profile, quad = _transfer_case(kind, resolution, u)
    defect = symmetry_defect(system, profile, quad)
    assert defect.symmetric
    assert abs(float(defect)) <= 1e-12


def test_constant_profile_symmetry():
    rot = create_system("rotation")
    assert symmetry_defect(rot, constant_profile(rot, 0.5)).symmetric
    defect = symmetry_defect(rot, constant_profile(rot, 0.6))
    assert not defect.symmetric
    assert float(defect) == pytest.approx(np.log(1.5))


@pytest.mark.parametrize("kind,resolution,u", TRANSFER_CASES)
def test_transfer_density_identity(kind, resolution, u):
    system, profile, quad = _transfer_case(kind, resolution, u)
    assert transfer_density_identity(system, profile, quad.nodes) <= 1e-12
    with pytest.raises(PreconditionError):
        transfer_density_identity(system, constant_profile(system, 0.5), quad.nodes)


def test_self_adjoint_and_contracting_at_stationarity():
    system, profile, quad = _transfer_case(*TRANSFER_CASES[0])
    density = DensityField.from_function(quad, profile.closed_form_density())
    psi = TrigObservable(1, [[1], [3]], [1.0, 0.5], [0.2, 0.0])
    chi = TrigObservable.sine(1, 2)
    assert self_adjointness_defect(system, profile, density, psi, chi) <= 1e-10
    image_norm, norm = l2_contraction(system, profile, density, psi)
    assert image_norm <= norm + 1e-12


def test_stationary_iteration_recovers_rotation_density():
    system, profile, quad = _transfer_case(*TRANSFER_CASES[0])
    density, residual, diag = stationary_iterate(system, profile, quad, tol=1e-10)
    assert diag.converged
    assert not diag.degenerate
    assert residual <= 1e-10
    assert diag.residual_history[-1] == residual
    oracle = DensityField.from_function(quad, profile.closed_form_density())
    error = np.max(np.abs(density.values - oracle.values) / oracle.values)
    assert error <= 1e-2
    assert "wall_time" not in diag.to_record(include_timing=False)


def test_stationary_iteration_uniform_for_fair_profile():
    cat = create_system("cat")
    quad = cat.mu_quadrature(32)
    density, residual, diag = stationary_iterate(cat, constant_profile(cat, 0.5), quad, max_iter=500)
    assert residual <= 1e-10
    assert np.allclose(density.values, 1.0, atol=1e-8)


@pytest.mark.parametrize("p", [0.0, 1.0, 0.99999])
def test_profile_clamp(p):
    rot = create_system("rotation")
    with pytest.raises(ProfileClampError):
        constant_profile(rot, p)


def test_profile_constructors():
    rot = create_system("rotation")
    with pytest.raises(ConfigError):
        constant_profile(rot, 1.5)
    log_phi = TrigObservable.cosine(1, 1, 0.5)
    profile = profile_from_log_phi(rot, log_phi)
    x = np.linspace(0.0, 1.0, 17, endpoint=False)
    assert np.allclose(profile.p(x) + profile.q(x), 1.0)
    assert np.allclose(np.log(profile.phi(x)), log_phi(x))
    assert profile.closed_form_density() is None
    quad = rot.mu_quadrature(64)
    grid = grid_profile(rot, quad, np.full(quad.size, 0.4))
    assert grid.p_min == pytest.approx(0.4)
    assert grid.describe()["kind"] == "grid"


def test_density_field_validation():
    quad = create_system("rotation").mu_quadrature(64)
    with pytest.raises(ConfigError):
        DensityField(quad, np.full(quad.size, 2.0))
    with pytest.raises(GridAlignmentError):
        DensityField(quad, np.ones(10))
    with pytest.raises(ConfigError):
        DensityField.from_values(quad, np.zeros(quad.size))
    density = DensityField.from_values(quad, np.linspace(1.0, 2.0, quad.size))
    assert density.mass == pytest.approx(1.0, abs=1e-12)
    assert density.sup_inf_ratio == pytest.approx(2.0)
    header, body = density.rows()
    assert header == ["index", "x", "value"]
    assert body.shape == (64, 3)
