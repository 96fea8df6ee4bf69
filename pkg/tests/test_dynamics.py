import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ergowalk.dynamics import SYSTEM_KINDS, SuLoop, SuPath, create_system, reduce_mod1
from ergowalk.dynamics.base import midpoint_quadrature
from ergowalk.dynamics.rotation import GOLDEN_ANGLE
from ergowalk.errors import (
    ConfigError,
    LoopNotClosedError,
    PeriodRangeError,
    PointKindError,
    UnsupportedStructureError,
)

unit = st.floats(min_value=0.0, max_value=1.0, exclude_max=True, allow_nan=False)
leaf_t = st.floats(min_value=-2.0, max_value=2.0, allow_nan=False)

# |det(A^n - I)| and orbits of minimal period n for A = [[2, 1], [1, 1]]
CAT_FIXED_POINTS = {1: 1, 2: 5, 3: 16, 4: 45}
CAT_PRIMITIVE_ORBITS = {1: 1, 2: 2, 3: 5, 4: 10}


@pytest.fixture(scope="module")
def cat():
    return create_system("cat")


@pytest.fixture(scope="module")
def rotation():
    return create_system("rotation")


def test_factory_knows_every_kind():
    for kind in SYSTEM_KINDS:
        assert create_system(kind).kind == kind
    with pytest.raises(ConfigError):
        create_system("horseshoe")


def test_reduce_mod1_range_and_idempotence():
    x = np.array([-1e-18, -0.25, 0.0, 1.0, 2.75, 1e9 + 0.5])
    r = reduce_mod1(x)
    assert np.all((r >= 0.0) & (r < 1.0))
    assert np.array_equal(reduce_mod1(r), r)


@pytest.mark.parametrize("alpha", [0.5, 0.25, 1.0 / 3.0, 0.0, 1.0])
def test_rational_rotation_rejected(alpha):
    with pytest.raises(ConfigError):
        create_system("rotation", alpha=alpha)


def test_rational_rotation_allowed_on_request():
    assert create_system("rotation", alpha=0.5, allow_rational=True).alpha == 0.5


@settings(max_examples=50, deadline=None)
@given(x=unit)
def test_rotation_inverse_pair(x):
    rotation = create_system("rotation")
    back = rotation.apply(rotation.apply(x, 1), -1)
    assert rotation.distance(back, x) <= 1e-15


def test_rotation_has_no_leaves(rotation):
    with pytest.raises(UnsupportedStructureError):
        rotation.leaf_flow(0.1, "s", 0.2)
    with pytest.raises(PointKindError):
        rotation.apply(np.zeros((3, 2)))


def test_rotation_reads_flat_arrays_as_batches(rotation):
    moved = rotation.apply(np.array([0.1, 0.2]))
    assert moved.shape == (2,)
    assert np.allclose(moved, reduce_mod1(np.array([0.1, 0.2]) + rotation.alpha))
    with pytest.raises(PointKindError):
        rotation.apply(np.array([[0.1, 0.2]]))
    with pytest.raises(PointKindError):
        create_system("cat").apply(np.float64(0.1))


@pytest.mark.parametrize(
    "matrix",
    [((1, 1), (0, 1)), ((2, 0), (0, 1)), ((1, 0), (0, 1)), ((2, 1), (1, 1), (0, 0)), ((1.5, 1), (1, 1))],
)
def test_invalid_cat_matrices(matrix):
    with pytest.raises(ConfigError):
        create_system("cat", matrix=matrix)


def test_cat_eigen_structure(cat):
    A = np.asarray(cat.matrix, dtype=float)
    assert np.allclose(A @ cat.e_u, cat.mu_u * cat.e_u, atol=1e-12)
    assert np.allclose(A @ cat.e_s, cat.mu_s * cat.e_s, atol=1e-12)
    assert cat.lambda_u == pytest.approx((3 + np.sqrt(5)) / 2)
    assert cat.lambda_u * cat.lambda_s == pytest.approx(1.0)


@settings(max_examples=50, deadline=None)
@given(x=unit, y=unit)
def test_cat_inverse_pair(x, y):
    cat = create_system("cat")
    p = np.array([x, y])
    assert cat.distance(cat.apply(cat.apply(p, 1), -1), p) <= 1e-12


@settings(max_examples=50, deadline=None)
@given(x=unit, y=unit, t=leaf_t)
def test_cat_leaf_conjugation(x, y, t):
    cat = create_system("cat")
    p = np.array([x, y])
    # f(W^s(x, t)) = W^s(f x, mu_s t) and f^-1(W^u(x, t)) = W^u(f^-1 x, t / mu_u)
    stable = cat.apply(cat.leaf_flow(p, "s", t), 1)
    assert cat.distance(stable, cat.leaf_flow(cat.apply(p, 1), "s", cat.leaf_multiplier("s") * t)) <= 1e-12
    unstable = cat.apply(cat.leaf_flow(p, "u", t), -1)
    assert cat.distance(unstable, cat.leaf_flow(cat.apply(p, -1), "u", cat.leaf_multiplier("u") * t)) <= 1e-12


@pytest.mark.parametrize("n", sorted(CAT_FIXED_POINTS))
def test_cat_periodic_points(cat, n):
    points = cat.periodic_points(n)
    assert points.shape == (CAT_FIXED_POINTS[n], 2)
    image = points
    for _ in range(n):
        image = cat.apply(image, 1)
    assert np.max(cat.distance(image, points)) <= 1e-9
    # lexicographic order
    order = np.lexsort((points[:, 1], points[:, 0]))
    assert np.array_equal(order, np.arange(len(points)))


@pytest.mark.parametrize("n", sorted(CAT_PRIMITIVE_ORBITS))
def test_cat_periodic_orbits(cat, n):
    orbits = cat.periodic_orbits(n)
    assert orbits.shape == (CAT_PRIMITIVE_ORBITS[n], n, 2)
    for orbit in orbits:
        for k in range(n):
            assert cat.distance(cat.apply(orbit[k], 1), orbit[(k + 1) % n]) <= 1e-9


@pytest.mark.parametrize("n", [0, 15, 2.5])
def test_cat_period_range(cat, n):
    with pytest.raises(PeriodRangeError):
        cat.periodic_points(n)


def test_cat_su_connect_reaches_target(cat):
    rng = np.random.default_rng(3)
    for _ in range(20):
        x, y = rng.random(2), rng.random(2)
        path = cat.su_connect(x, y)
        assert path.kinds == ("u", "s")
        assert cat.distance(path.endpoint(cat), y) <= 1e-12


def test_cat_su_connect_to_itself_is_trivial(cat):
    x = np.array([0.37, 0.81])
    path = cat.su_connect(x, x)
    assert path.segments == (("u", 0.0), ("s", 0.0))
    assert np.array_equal(path.endpoint(cat), x)


def test_cat_connect_parameters_sorted(cat):
    params = cat.connect_parameters(np.zeros(2), np.random.default_rng(4).random((5, 2)), K=2)
    assert params.shape == (5, 25, 2)
    lengths = np.abs(params).sum(axis=-1)
    assert np.all(np.diff(lengths, axis=1) >= 0)


def test_su_loop_closure(cat):
    base = np.array([0.3, 0.6])
    square = SuPath(base=base, segments=(("u", 0.2), ("s", 0.1), ("u", -0.2), ("s", -0.1)))
    loop = SuLoop.close(cat, square)
    assert loop.closure_defect <= 1e-12
    assert len(loop.reversed(cat)) == 4
    assert len(loop.concat(cat, loop)) == 8
    with pytest.raises(LoopNotClosedError):
        SuLoop.close(cat, SuPath(base=base, segments=(("u", 0.2),)))
    with pytest.raises(ConfigError):
        SuPath(base=base, segments=(("x", 0.2),))


@pytest.mark.parametrize("kind,resolution", [("rotation", 64), ("cat", 16)])
def test_midpoint_quadrature(kind, resolution):
    quad = midpoint_quadrature(kind, resolution)
    assert quad.weights.sum() == pytest.approx(1.0)
    assert np.all((quad.nodes > 0) & (quad.nodes < 1))
    # trigonometric polynomials of degree < n integrate exactly
    if kind == "rotation":
        values = np.cos(2 * np.pi * 3 * quad.nodes)
    else:
        values = np.cos(2 * np.pi * (quad.nodes[:, 0] + 2 * quad.nodes[:, 1]))
    assert abs(quad.integrate(values)) <= 1e-14
    assert quad.integrate(np.ones(quad.size)) == pytest.approx(1.0)


def test_quadrature_interpolation_reproduces_nodes():
    quad = midpoint_quadrature("cat", 16)
    values = np.random.default_rng(0).random(quad.size)
    assert np.allclose(quad.interpolate(values, quad.nodes), values, atol=1e-13)
    cols, weights = quad.stencil(np.random.default_rng(1).random((10, 2)))
    assert cols.shape == weights.shape == (10, 4)
    assert np.allclose(weights.sum(axis=1), 1.0)
    with pytest.raises(ConfigError):
        midpoint_quadrature("rotation", 4)


@pytest.mark.parametrize("kind", ["rotation", "cat", "geodesic"])
def test_cell_index_range(kind):
    system = create_system(kind)
    x = system.mu_sample(np.random.default_rng(5), 200)
    cells = system.cell_index(x, 16)
    assert cells.shape == (200,)
    assert np.all((cells >= 0) & (cells < system.n_cells(16)))


def test_rotation_describe():
    assert create_system("rotation").describe() == {"kind": "rotation", "alpha": GOLDEN_ANGLE}
