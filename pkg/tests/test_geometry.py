"""Kernel constants, sphere quadrature, ray scans, dyadic cubes."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose
from scipy.optimize import brentq

from bvy.geometry import (
    DirectionSet,
    DyadicCube,
    containing_dyadic_cube,
    cube_for_ball,
    dyadic_shifts,
    kappa,
    kappa_from_quadrature,
    kappa_monte_carlo,
    radial_kernel_integral,
    ray_transitions,
    sphere_quadrature,
    unit_ball_volume,
    unit_sphere_area,
)
from bvy.testbench import make_bump, make_tensor_bump


# ---------------------------------------------------------------------------
# kernel constant
# ---------------------------------------------------------------------------


def test_kappa_exact_values():
    assert kappa(1.0, 1) == pytest.approx(2.0, rel=1e-14)
    assert kappa(2.0, 1) == pytest.approx(2.0, rel=1e-14)
    assert kappa(1.0, 2) == pytest.approx(4.0, rel=1e-14)
    assert kappa(2.0, 2) == pytest.approx(math.pi, rel=1e-14)
    assert kappa(2.0, 3) == pytest.approx(4.0 * math.pi / 3.0, rel=1e-14)


def test_kappa_q_to_zero_recovers_sphere_area():
    # the directional moment of |omega . e|^q tends to the full sphere area
    for n in (1, 2, 3):
        assert kappa(1e-12, n) == pytest.approx(unit_sphere_area(n), rel=1e-9)


def test_sphere_area_and_ball_volume():
    assert unit_sphere_area(1) == pytest.approx(2.0)
    assert unit_sphere_area(2) == pytest.approx(2 * math.pi)
    assert unit_sphere_area(3) == pytest.approx(4 * math.pi)
    assert unit_ball_volume(1) == pytest.approx(2.0)
    assert unit_ball_volume(2) == pytest.approx(math.pi)
    assert unit_ball_volume(3) == pytest.approx(4 * math.pi / 3)


@pytest.mark.parametrize("q", [0.5, 1.0, 2.0, 3.0])
@pytest.mark.parametrize("n", [1, 2])
def test_kappa_quadrature_oracle(q, n):
    assert kappa_from_quadrature(q, n) == pytest.approx(kappa(q, n), rel=1e-6)


@pytest.mark.parametrize("q", [0.5, 1.0, 2.0, 3.0])
def test_kappa_monte_carlo_n3(q):
    assert kappa_monte_carlo(q, n=3, seed=0) == pytest.approx(kappa(q, 3), rel=1e-3)


# ---------------------------------------------------------------------------
# direction sets
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("n", [1, 2, 3])
def test_sphere_quadrature_weights_sum_to_sphere_area(n):
    ds = sphere_quadrature(n, resolution=64)
    assert ds.dim == n
    assert ds.total_weight() == pytest.approx(unit_sphere_area(n), rel=1e-12)
    norms = np.linalg.norm(ds.directions, axis=1)
    assert_allclose(norms, 1.0, rtol=0, atol=1e-12)
    assert np.all(ds.weights > 0)


@pytest.mark.parametrize(
    "n,q,tol",
    [
        (1, 1.0, 1e-12),   # two-point rule is exact in one dimension
        (2, 2.0, 1e-12),   # midpoint rule is exact on trigonometric monomials
        (2, 0.5, 1e-3),    # |cos|^0.5 has kinks: midpoint converges at m^-1.5
        (3, 2.0, 2e-3),    # spiral rule on the sphere
    ],
)
def test_direction_moment_matches_kappa(n, q, tol):
    ds = sphere_quadrature(n, resolution=256)
    axis = np.zeros(n)
    axis[0] = 1.0
    assert ds.moment(q, axis) == pytest.approx(kappa(q, n), rel=tol)


def test_direction_moment_rotation_invariant_n2():
    ds = sphere_quadrature(2, resolution=512)
    m0 = ds.moment(2.0, np.array([1.0, 0.0]))
    m1 = ds.moment(2.0, np.array([0.6, 0.8]))
    assert m1 == pytest.approx(m0, rel=1e-9)


def test_direction_set_validation():
    with pytest.raises(ValueError):
        DirectionSet(directions=np.array([[2.0]]), weights=np.array([1.0]))
    with pytest.raises(ValueError):
        DirectionSet(directions=np.array([[1.0]]), weights=np.array([-1.0]))


# ---------------------------------------------------------------------------
# ray transitions: independent dense-scan oracle
# ---------------------------------------------------------------------------


def _reference_intervals(profile, lam, beta, gamma, r_max, samples=200_001):
    """Independent oracle: dense scan + root polishing on the indicator.

    ``profile(r)`` is |f(x) - f(x + r*omega)| along the ray.  The active set
    is {r : profile(r) > lam * r**beta}; endpoints are polished with brentq
    on the continuous margin function.
    """
    rs = np.linspace(1e-9, r_max, samples)
    margin = np.array([profile(float(r)) - lam * r**beta for r in rs])
    active = margin > 0
    edges = []
    for i in range(len(rs) - 1):
        if active[i] != active[i + 1]:
            root = brentq(lambda r: profile(r) - lam * r**beta, rs[i], rs[i + 1],
                          xtol=1e-14, rtol=1e-15)
            edges.append(root)
    intervals = []
    if active[0]:
        start = 0.0 if beta > 1 else rs[0]
        edges = [start] + edges
    if active[-1]:
        edges = edges + [r_max]
    for i in range(0, len(edges), 2):
        intervals.append((edges[i], edges[i + 1]))
    return intervals


def test_ray_transitions_bump_matches_dense_oracle():
    f = make_bump()
    x = np.array([-0.5])
    omega = np.array([1.0])
    gamma, q, lam = 1.0, 1.0, 0.3
    beta = 1.0 + gamma / q
    res = ray_transitions(f, x, omega, lam, gamma, q, r_max=6.0)

    fx = f.eval(-0.5)
    profile = lambda r: abs(fx - f.eval(-0.5 + r))
    ref = _reference_intervals(profile, lam, beta, gamma, 6.0)
    assert len(res.intervals) == len(ref)
    for (a, b), (ra, rb) in zip(res.intervals, ref):
        assert a == pytest.approx(ra, rel=1e-7, abs=1e-9)
        assert b == pytest.approx(rb, rel=1e-7, abs=1e-9)
    assert not res.truncated


def test_ray_transitions_negative_gamma_matches_dense_oracle():
    f = make_bump()
    x = np.array([0.1])
    omega = np.array([-1.0])
    gamma, q, lam = -2.0, 1.0, 0.05
    beta = 1.0 + gamma / q  # = -1 < 0
    res = ray_transitions(f, x, omega, lam, gamma, q, r_max=8.0)

    fx = f.eval(0.1)
    profile = lambda r: abs(fx - f.eval(0.1 - r))
    ref = _reference_intervals(profile, lam, beta, gamma, 8.0)
    assert len(res.intervals) == len(ref)
    for (a, b), (ra, rb) in zip(res.intervals, ref):
        # beta < 1 head opens at the scan floor, a sound underestimate
        assert a == pytest.approx(ra, rel=1e-6, abs=1e-7)
        assert b == pytest.approx(rb, rel=1e-6, abs=1e-7)
    # for gamma < 0 the indicator can stay active arbitrarily far out
    assert res.truncated
    assert res.tail_bound == pytest.approx(8.0**gamma / (-gamma))


def test_ray_transitions_multi_interval():
    # two bumps along one ray produce two active intervals at suitable lam
    f = make_bump()
    x = np.array([0.0])
    omega = np.array([1.0])
    lam = 0.12
    res = ray_transitions(f, x, omega, lam, gamma=1.0, q=1.0, r_max=6.0)
    fx = f.eval(0.0)
    profile = lambda r: abs(fx - f.eval(r))
    ref = _reference_intervals(profile, lam, 2.0, 1.0, 6.0)
    assert len(res.intervals) == len(ref) >= 1


def test_radial_kernel_integral_positive_gamma():
    # integral of r^{gamma-1} over [a,b] = (b^g - a^g)/g; [0, b] allowed for g > 0
    assert radial_kernel_integral([(0.0, 2.0)], 1.0) == pytest.approx(2.0)
    assert radial_kernel_integral([(1.0, 3.0)], 2.0) == pytest.approx((9 - 1) / 2)
    with pytest.raises(ValueError):
        radial_kernel_integral([(0.0, 1.0)], -1.0)


@given(
    gamma=st.floats(-3.0, 3.0).filter(lambda g: abs(g) > 1e-3),
    pts=st.lists(st.floats(0.01, 10.0), min_size=2, max_size=8, unique=True),
)
@settings(max_examples=80, deadline=None)
def test_radial_kernel_integral_additivity(gamma, pts):
    # splitting an interval at any interior points never changes the integral
    pts = sorted(pts)
    whole = radial_kernel_integral([(pts[0], pts[-1])], gamma)
    split = radial_kernel_integral(list(zip(pts[:-1], pts[1:])), gamma)
    assert split == pytest.approx(whole, rel=1e-10)


# ---------------------------------------------------------------------------
# dyadic cubes
# ---------------------------------------------------------------------------


def test_dyadic_shifts():
    assert dyadic_shifts(1) == ((0.0,), (1 / 3,), (2 / 3,))
    assert len(dyadic_shifts(2)) == 9
    assert len(dyadic_shifts(3)) == 27


def test_containing_cube_contains_point():
    rng = np.random.default_rng(42)
    for _ in range(50):
        dim = int(rng.integers(1, 4))
        x = rng.uniform(-100, 100, size=dim)
        level = int(rng.integers(-8, 8))
        shift = dyadic_shifts(dim)[int(rng.integers(0, 3**dim))]
        cube = containing_dyadic_cube(level, shift, x)
        assert cube.contains_point(x)
        assert cube.side == pytest.approx(2.0**level)


def test_dyadic_nestedness_within_shift():
    # a cube of level j is contained in the level-(j+1) cube holding its center
    rng = np.random.default_rng(7)
    for dim in (1, 2):
        for shift in dyadic_shifts(dim):
            for _ in range(20):
                x = rng.uniform(-10, 10, size=dim)
                small = containing_dyadic_cube(-2, shift, x)
                big = containing_dyadic_cube(-1, shift, small.center())
                assert big.contains_cube(small)


def test_cube_for_ball_bounded_ratio():
    # one of the three shifted systems holds a cube containing the ball
    # with side at most a fixed multiple of the diameter
    rng = np.random.default_rng(11)
    worst = 0.0
    for _ in range(60):
        dim = int(rng.integers(1, 4))
        center = rng.uniform(-50, 50, size=dim)
        radius = float(10.0 ** rng.uniform(-3, 2))
        shift, cube, ratio = cube_for_ball(center, radius)
        assert cube.contains_point(center)
        # every corner of the bounding box of the ball lies inside the cube
        for corner in range(2**dim):
            offs = np.array([(1 if corner >> k & 1 else -1) for k in range(dim)])
            pt = center + 0.999 * radius * offs / np.sqrt(dim)
            assert cube.contains_point(pt)
        worst = max(worst, ratio)
    assert worst <= 4.0


def test_cube_contains_cube_and_intersects():
    a = DyadicCube(level=0, index=(0,), shift=(0.0,))
    b = DyadicCube(level=-1, index=(0,), shift=(0.0,))
    assert a.contains_cube(b)
    assert a.intersects(b)
    far = DyadicCube(level=0, index=(5,), shift=(0.0,))
    assert not a.intersects(far)
