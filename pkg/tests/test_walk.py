import numpy as np
import pytest

from ergowalk.cohomology import TrigObservable
from ergowalk.dynamics import create_system
from ergowalk.errors import ConfigError
from ergowalk.markov import constant_profile, make_profile_from_transfer
from ergowalk.walk import (
    default_threads,
    read_steps,
    recurrence_stats,
    simulate_ensemble,
    simulate_quenched,
    summary_header,
    summary_rows,
    walk_stream,
    write_steps,
)
from ergowalk.walk.export import HEADER
from ergowalk.walk.rng import SHIFT, START, STEPS

SYSTEM_KINDS = ["rotation", "cat", "geodesic"]


def _fair(kind):
    system = create_system(kind)
    return system, constant_profile(system, 0.5)


def _rotation_transfer():
    system = create_system("rotation")
    return system, make_profile_from_transfer(system, TrigObservable.cosine(1, 1, 0.3))


def test_streams_are_keyed_by_walk_and_purpose():
    a = walk_stream(9, 3).random(4)
    assert np.array_equal(a, walk_stream(9, 3, STEPS).random(4))
    for other in (walk_stream(9, 4), walk_stream(10, 3), walk_stream(9, 3, START), walk_stream(9, 3, SHIFT)):
        assert not np.array_equal(a, other.random(4))


@pytest.mark.parametrize("kind", SYSTEM_KINDS)
def test_single_walk_bookkeeping(kind):
    system, profile = _fair(kind)
    x0 = system.mu_sample(np.random.default_rng(0))
    walk = simulate_quenched(system, profile, x0, 301, np.random.default_rng(1), stride=10)

    steps = walk.steps
    positions = walk.positions
    assert steps.shape == (301,)
    assert set(np.unique(steps)) <= {-1, 1}
    assert walk.final_position == positions[-1] == steps.sum()
    assert walk.min_position == min(0, positions.min())
    assert walk.max_position == max(0, positions.max())
    zeros = np.flatnonzero(positions[1:] == 0)
    assert walk.first_return == (zeros[0] + 1 if zeros.size else -1)
    assert walk.returned == (zeros.size > 0)
    assert walk.states.shape == (31,) + system.point_shape
    assert np.array_equal(walk.state_at(0), x0)
    assert walk.distinct_sites == walk.max_position - walk.min_position + 1
    assert 1 <= walk.visited_cells <= min(walk.n_cells, 302)
    with pytest.raises(ConfigError):
        walk.state_at(5)


def test_states_follow_the_steps():
    system, profile = _rotation_transfer()
    walk = simulate_quenched(system, profile, np.float64(0.25), 200, np.random.default_rng(2), stride=1)
    omega = np.array([0.25])
    for k, step in enumerate(walk.steps):
        omega = system.apply(omega, np.array([step], dtype=np.int64))
        assert omega[0] == walk.states[k + 1]


def test_same_uniforms_same_walk():
    system, profile = _rotation_transfer()
    a = simulate_quenched(system, profile, 0.1, 500, np.random.default_rng(5))
    b = simulate_quenched(system, profile, 0.1, 500, np.random.default_rng(5))
    assert np.array_equal(a.packed_steps, b.packed_steps)
    assert np.array_equal(a.states, b.states)


@pytest.mark.parametrize("kind", ["rotation", "cat"])
def test_ensemble_independent_of_threads(kind):
    system, profile = _fair(kind)
    one = simulate_ensemble(system, profile, 13, 257, master_seed=42, threads=1)
    many = simulate_ensemble(system, profile, 13, 257, master_seed=42, threads=4)
    assert np.array_equal(one.packed_steps, many.packed_steps)
    assert np.array_equal(one.states, many.states)
    assert np.array_equal(one.first_return, many.first_return)
    assert np.array_equal(one.visited_cells, many.visited_cells)
    assert np.array_equal(one.indices, np.arange(13))


def test_ensemble_walks_are_addressable_by_index():
    system, profile = _fair("cat")
    full = simulate_ensemble(system, profile, 10, 100, master_seed=3)
    tail = simulate_ensemble(system, profile, 4, 100, master_seed=3, first_index=6)
    assert np.array_equal(full.packed_steps[6:], tail.packed_steps)
    assert np.array_equal(full.x0[6:], tail.x0)
    assert tail[0].seed == (3, 6)


def test_ensemble_items_replay_with_their_stream():
    system, profile = _rotation_transfer()
    ensemble = simulate_ensemble(system, profile, 3, 150, master_seed=8, stride=50)
    for i, sample in enumerate(ensemble):
        replay = simulate_quenched(system, profile, sample.x0, 150, walk_stream(8, i), stride=50)
        assert np.array_equal(replay.packed_steps, sample.packed_steps)
        assert np.array_equal(replay.states, sample.states)
        assert replay.first_return == sample.first_return


def test_fair_walk_matches_simple_random_walk():
    system, profile = _fair("rotation")
    ensemble = simulate_ensemble(system, profile, 2000, 1000, master_seed=1, stride=1000)
    final = ensemble.final_position
    assert abs(final.mean()) <= 4 * np.sqrt(1000 / 2000)
    assert final.var() == pytest.approx(1000, rel=0.15)
    assert np.all(final % 2 == 0)


def test_recurrence_of_fair_walks():
    system, profile = _fair("cat")
    ensemble = simulate_ensemble(system, profile, 500, 4000, master_seed=2, stride=4000, cells_per_axis=8)
    report = recurrence_stats(ensemble)
    summary = report.summary()
    assert summary["n_walks"] == 500
    assert summary["return_fraction"] >= 0.95
    assert summary["return_fraction"] + summary["censored_fraction"] == pytest.approx(1.0)
    assert summary["sign_coverage_fraction"] >= 0.95
    assert 0.0 < summary["median_cell_coverage"] <= 1.0
    assert 0.0 < summary["median_coverage_efficiency"] <= 1.0
    assert len(report.rows()) == 500
    assert len(report.rows()[0]) == len(report.header())


def test_walk_with_p_one_never_returns():
    system = create_system("cat")
    profile = constant_profile(system, 1.0, validate=False)
    ensemble = simulate_ensemble(system, profile, 20, 1000, master_seed=6, stride=1000)
    assert np.all(ensemble.final_position == 1000)
    assert np.all(ensemble.steps() == 1)
    summary = recurrence_stats(ensemble).summary()
    assert summary["return_fraction"] == 0.0
    assert summary["sign_coverage_fraction"] == 0.0


def test_recurrence_stats_accepts_samples():
    system, profile = _fair("rotation")
    ensemble = simulate_ensemble(system, profile, 5, 64, master_seed=4)
    from_samples = recurrence_stats(list(ensemble))
    from_ensemble = recurrence_stats(ensemble)
    assert from_samples.summary() == from_ensemble.summary()
    assert from_samples.seeds == from_ensemble.seeds
    with pytest.raises(ConfigError):
        recurrence_stats([])
    other = simulate_quenched(system, profile, 0.3, 65, np.random.default_rng(0))
    with pytest.raises(ConfigError):
        recurrence_stats([ensemble[0], other])


def test_observable_sums_match_states():
    system, profile = _rotation_transfer()
    obs = TrigObservable.cosine(1, 1)
    walk = simulate_quenched(system, profile, 0.4, 120, np.random.default_rng(6), stride=1,
                             observable=obs, checkpoints=(10, 120, 500))
    assert walk.checkpoints == (10, 120)
    values = obs(walk.states)
    assert walk.observable_sums[0] == pytest.approx(values[:10].sum(), abs=1e-12)
    assert walk.observable_sums[1] == pytest.approx(values[:120].sum(), abs=1e-12)
    assert walk.birkhoff_averages()[1] == pytest.approx(values[:120].mean(), abs=1e-12)


@pytest.mark.parametrize("n_steps,stride", [(0, 1), (10, 0), (2.5, 1)])
def test_invalid_walk_parameters(n_steps, stride):
    system, profile = _fair("rotation")
    with pytest.raises(ConfigError):
        simulate_quenched(system, profile, 0.1, n_steps, np.random.default_rng(0), stride=stride)


def test_step_dump_round_trip(tmp_path):
    system, profile = _fair("cat")
    ensemble = simulate_ensemble(system, profile, 6, 77, master_seed=12, first_index=2)
    path = tmp_path / "steps.bin"
    write_steps(path, ensemble)
    header, steps = read_steps(path)
    assert header == {"version": 1, "n_steps": 77, "seed": 12, "n_walks": 6, "first_index": 2}
    assert np.array_equal(steps, ensemble.steps())
    assert path.stat().st_size == HEADER.size + 6 * 10


def test_step_dump_rejects_foreign_files(tmp_path):
    bad = tmp_path / "bad.bin"
    bad.write_bytes(b"NOPE" + bytes(60))
    with pytest.raises(ConfigError):
        read_steps(bad)
    short = tmp_path / "short.bin"
    short.write_bytes(b"EWLK")
    with pytest.raises(ConfigError):
        read_steps(short)


def test_summary_rows():
    system, profile = _fair("rotation")
    ensemble = simulate_ensemble(system, profile, 3, 40, master_seed=0)
    rows = summary_rows(ensemble)
    assert len(rows) == 3
    assert all(len(row) == len(summary_header()) for row in rows)
    assert [row[1] for row in rows] == [0, 1, 2]


def test_default_threads_from_environment(monkeypatch):
    monkeypatch.setenv("ERGOWALK_THREADS", "3")
    assert default_threads() == 3
    monkeypatch.setenv("ERGOWALK_THREADS", "zero")
    with pytest.raises(ConfigError):
        default_threads()
    monkeypatch.setenv("ERGOWALK_THREADS", "0")
    with pytest.raises(ConfigError):
        default_threads()
    monkeypatch.delenv("ERGOWALK_THREADS")
    assert default_threads() >= 1
