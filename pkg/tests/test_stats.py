import numpy as np
import pytest

from ergowalk.cohomology import ConstantObservable, FunctionObservable, TrigObservable
from ergowalk.dynamics import create_system
from ergowalk.errors import ConfigError, PreconditionError, UnsupportedStructureError
from ergowalk.markov import DensityField, constant_profile, make_profile_from_transfer
from ergowalk.stats import (
    birkhoff_average,
    birkhoff_ensemble,
    clt_experiment,
    gordin_variance,
    lyapunov_balance,
    nu_expectation,
    nu_sampler,
    sample_nu,
    shift_consistency,
)
from ergowalk.stats.birkhoff import checkpoints_for
from ergowalk.stats.clt import martingale_part

COS = TrigObservable.cosine(1, 1)
CAT_U = TrigObservable(2, [[1, 0], [0, 1]], [0.2, 0.0], [0.0, 0.2])


def _fair_rotation(resolution=4096):
    system = create_system("rotation")
    profile = constant_profile(system, 0.5)
    return system, profile, DensityField.uniform(system.mu_quadrature(resolution))


def _transfer(kind, u, resolution):
    system = create_system(kind)
    profile = make_profile_from_transfer(system, u)
    density = DensityField.from_function(system.mu_quadrature(resolution), profile.closed_form_density())
    return system, profile, density


def test_sample_nu_on_the_circle():
    system, profile, density = _transfer("rotation", TrigObservable.cosine(1, 1, 0.3), 1024)
    x = sample_nu(system, density, 20_000, np.random.default_rng(0))
    assert x.shape == (20_000,)
    assert np.all((x >= 0.0) & (x < 1.0))
    assert np.mean(COS(x)) == pytest.approx(density.integrate(COS), abs=0.025)


def test_sample_nu_on_the_torus():
    system, profile, density = _transfer("cat", CAT_U, 64)
    x = sample_nu(system, density, 500, np.random.default_rng(1))
    assert x.shape == (500, 2)
    assert np.all((x >= 0.0) & (x < 1.0))
    start = nu_sampler(system, density)(np.random.default_rng(2))
    assert start.shape == (2,)


def test_sample_nu_errors():
    system, profile, density = _fair_rotation(64)
    with pytest.raises(ConfigError):
        sample_nu(system, density, 0, np.random.default_rng(0))
    with pytest.raises(PreconditionError):
        sample_nu(create_system("cat"), density, 5, np.random.default_rng(0))
    with pytest.raises(ConfigError):
        sample_nu(system, 3.0, 5, np.random.default_rng(0))


def test_nu_expectation_grid_and_monte_carlo():
    system, profile, density = _transfer("rotation", TrigObservable.cosine(1, 1, 0.3), 1024)
    exact, stderr = nu_expectation(system, density, COS)
    assert stderr == 0.0
    estimate, mc_err = nu_expectation(system, profile.closed_form_density(), COS, np.random.default_rng(3))
    assert mc_err > 0.0
    assert abs(estimate - exact) <= 5 * mc_err + 1e-3
    _, _, uniform = _fair_rotation(64)
    assert nu_expectation(system, uniform, COS)[0] == pytest.approx(0.0, abs=1e-14)


def test_gordin_variance_of_fair_rotation():
    system, profile, density = _fair_rotation()
    # P cos(2 pi x) = cos(2 pi alpha) cos(2 pi x)
    expected = np.sin(2 * np.pi * system.alpha) ** 2 / 2
    assert gordin_variance(system, profile, density, COS) == pytest.approx(expected, abs=1e-10)


def test_gordin_variance_ignores_constant_shifts():
    system, profile, density = _transfer("rotation", TrigObservable.cosine(1, 1, 0.3), 1024)
    psi = TrigObservable(1, [[1], [2]], [0.4, 0.1], [0.2, 0.0])
    shifted = psi + 0.7
    assert gordin_variance(system, profile, density, shifted) == pytest.approx(
        gordin_variance(system, profile, density, psi), abs=1e-12
    )


def test_martingale_part():
    system, profile, _ = _fair_rotation()
    phi = martingale_part(system, profile, COS)
    x = np.linspace(0.0, 1.0, 33)
    assert np.allclose(phi(x), (1 - np.cos(2 * np.pi * system.alpha)) * COS(x), atol=1e-12)


def test_clt_on_fair_rotation():
    system, profile, density = _fair_rotation()
    report = clt_experiment(system, profile, density, COS, n_walks=400, n_steps=400, master_seed=7)
    assert not report.degenerate
    assert report.ks < 0.12
    assert abs(report.variance_zscore) < 5
    assert len(report.deciles) == 9
    header, rows = report.decile_rows()
    assert header == ["quantile", "empirical", "normal"]
    assert rows[4][2] == pytest.approx(0.0, abs=1e-12)
    assert report.to_record()["n_walks"] == 400


def test_clt_degenerate_for_constants():
    system, profile, density = _fair_rotation(256)
    report = clt_experiment(system, profile, density, ConstantObservable(1.0), n_walks=10, n_steps=10,
                            master_seed=0)
    assert report.degenerate
    assert report.sigma2 == 0.0
    assert report.passed is None
    assert report.ks is None


def test_threads_do_not_change_clt_sums():
    system, profile, density = _fair_rotation(256)
    one = clt_experiment(system, profile, density, COS, 12, 50, master_seed=5, threads=1)
    three = clt_experiment(system, profile, density, COS, 12, 50, master_seed=5, threads=3)
    assert one.ks == three.ks
    assert one.empirical_variance == three.empirical_variance


def test_lyapunov_balance_for_transfer_profile():
    system, profile, density = _transfer("cat", CAT_U, 128)
    report = lyapunov_balance(system, profile, density)
    assert report.asserted
    assert report.balanced
    assert abs(report.imbalance) <= 1e-8
    assert report.lhs == pytest.approx(report.rhs, abs=1e-8)
    assert report.lhs == pytest.approx(0.5 * np.log(system.lambda_u), abs=1e-8)


def test_lyapunov_balance_for_biased_profile():
    system = create_system("cat")
    profile = constant_profile(system, 0.6)
    density = DensityField.uniform(system.mu_quadrature(32))
    report = lyapunov_balance(system, profile, density)
    assert report.balanced is None
    assert report.imbalance == pytest.approx(0.2, abs=1e-12)
    assert report.expected_exponent == pytest.approx(0.2 * np.log(system.lambda_u))


def test_lyapunov_balance_requires_hyperbolicity():
    system, profile, density = _fair_rotation(64)
    with pytest.raises(UnsupportedStructureError):
        lyapunov_balance(system, profile, density)
    with pytest.raises(PreconditionError):
        lyapunov_balance(create_system("cat"), constant_profile(create_system("cat"), 0.5))


def test_lyapunov_fiber_exponent_monte_carlo():
    system, profile, density = _transfer("cat", CAT_U, 64)
    report = lyapunov_balance(system, profile, density, n_walks=200, n_steps=200, master_seed=11)
    assert report.n_walks == 200
    assert report.stderr > 0
    assert abs(report.fiber_zscore) < 5
    assert report.to_record()["fiber_zscore"] == report.fiber_zscore


def test_shift_consistency():
    system, profile, density = _transfer("rotation", TrigObservable.cosine(1, 1, 0.3), 1024)
    report = shift_consistency(system, profile, density, COS, n_walks=500, shift=5, master_seed=3,
                               significance=1e-4)
    assert report.consistent
    assert report.to_record()["shift"] == 5
    with pytest.raises(ConfigError):
        shift_consistency(system, profile, density, COS, 10, 0, master_seed=3)


def test_checkpoints_for():
    assert checkpoints_for(5000) == (100, 1000, 5000)
    assert checkpoints_for(50) == (50,)
    assert checkpoints_for(1000) == (100, 1000)


def test_birkhoff_average_single_walk():
    system, profile, density = _transfer("rotation", TrigObservable.cosine(1, 1, 0.3), 1024)
    result = birkhoff_average(system, profile, COS, 0.2, 5000, np.random.default_rng(4), density=density)
    assert result.checkpoints == (100, 1000, 5000)
    assert result.averages.shape == (3,)
    assert np.all(np.abs(result.averages) <= 1.0)
    assert result.target == pytest.approx(density.integrate(COS))
    assert result.error == pytest.approx(abs(result.final - result.target))


def test_birkhoff_ensemble_centres_on_target():
    system, profile, density = _fair_rotation(256)
    result = birkhoff_ensemble(system, profile, COS, 50, 5000, master_seed=9, density=density)
    assert result.averages.shape == (50, 3)
    assert result.target == pytest.approx(0.0, abs=1e-14)
    assert abs(result.mean[-1]) <= 5 * result.spread[-1] + 1e-3
    header, rows = result.rows()
    assert header == ["checkpoint", "mean", "stderr"]
    assert [r[0] for r in rows] == [100, 1000, 5000]
    assert 0.0 <= result.fraction_within(2.0) <= 1.0


def test_birkhoff_average_of_e_u_on_the_cat():
    system, profile, density = _transfer("cat", CAT_U, 128)
    e_u = FunctionObservable(lambda x: np.exp(CAT_U(x)), name="exp u")
    result = birkhoff_average(system, profile, e_u, np.array([0.3, 0.7]), 100_000, np.random.default_rng(12),
                              density=density)
    assert result.checkpoints[-1] == 100_000
    assert result.final == pytest.approx(result.target, rel=0.02)
