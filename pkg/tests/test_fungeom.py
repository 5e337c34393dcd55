"""Sphere geometry of warping functions."""

import numpy as np
import pytest

from combined_fda.errors import ConvergenceError, GeodesicDomainError, GridValidationError, PhaseDomainError
from combined_fda.geometry import (
    SampledCurve,
    SphereFunction,
    TangentFunction,
    TimeGrid,
    WarpingFunction,
    compose_amplitude_phase,
    compose_warps,
    exp_map,
    geodesic_distance,
    invert_warp,
    karcher_mean_sphere,
    log_map,
    phi,
    phi_inverse,
    srvf_of_warp,
    warp_of_srvf,
)

from .helpers import exp_warp


def random_warp(grid: TimeGrid, rng) -> WarpingFunction:
    steps = rng.uniform(0.1, 1.1, grid.k - 1)
    values = np.concatenate([[0.0], np.cumsum(steps)]) / steps.sum()
    values[-1] = 1.0
    return WarpingFunction(grid, values)


def random_unit(grid: TimeGrid, rng) -> SphereFunction:
    return SphereFunction.normalized(grid, rng.uniform(0.5, 1.5, grid.k))


def test_time_grid_rejects_bad_points():
    with pytest.raises(GridValidationError):
        TimeGrid(np.array([0.0, 0.5]))
    with pytest.raises(GridValidationError) as exc:
        TimeGrid(np.array([0.0, 0.4, 0.4, 1.0]))
    assert exc.value.index == 2


def test_warp_rejects_non_monotone(grid):
    values = grid.points.copy()
    values[50] = values[49]
    with pytest.raises(GridValidationError) as exc:
        WarpingFunction(grid, values)
    assert exc.value.index == 50


def test_srvf_of_identity_is_one(grid):
    q = srvf_of_warp(WarpingFunction.identity(grid))
    np.testing.assert_allclose(q.values, 1.0, atol=1e-12)


def test_srvf_of_square(grid):
    t = grid.points
    q = srvf_of_warp(WarpingFunction(grid, t**2))
    np.testing.assert_allclose(q.values[1:-1], np.sqrt(2 * t[1:-1]), atol=1e-6)


def test_srvf_has_unit_norm(grid, rng):
    for _ in range(20):
        assert abs(srvf_of_warp(random_warp(grid, rng)).norm - 1.0) < 1e-8


def test_warp_of_constant_srvf_is_identity(grid):
    gamma = warp_of_srvf(SphereFunction.constant_one(grid))
    np.testing.assert_allclose(gamma.values, grid.points, atol=1e-12)


def test_warp_of_sqrt_srvf_is_square(grid):
    q = SphereFunction(grid, np.sqrt(2 * grid.points))
    np.testing.assert_allclose(warp_of_srvf(q).values, grid.points**2, atol=1e-12)


def _srvf_roundtrip_error(k: int) -> float:
    grid = TimeGrid.uniform(k)
    gamma = exp_warp(grid)
    return float(np.max(np.abs(warp_of_srvf(srvf_of_warp(gamma)).values - gamma.values)))


def _phase_roundtrip_error(k: int) -> float:
    grid = TimeGrid.uniform(k)
    gamma = exp_warp(grid)
    return float(np.max(np.abs(phi_inverse(phi(gamma)).values - gamma.values)))


@pytest.mark.parametrize("roundtrip", [_srvf_roundtrip_error, _phase_roundtrip_error])
def test_roundtrips_converge_quadratically(roundtrip):
    coarse, fine = roundtrip(101), roundtrip(401)
    assert coarse <= 1e-4
    assert fine <= coarse / 4


def test_geodesic_distance_to_sqrt():
    grid = TimeGrid.uniform(2001)
    q = SphereFunction(grid, np.sqrt(2 * grid.points))
    d = geodesic_distance(SphereFunction.constant_one(grid), q)
    assert d == pytest.approx(np.arccos(2 * np.sqrt(2) / 3), abs=1e-4)


def test_geodesic_distance_is_a_metric(grid, rng):
    for _ in range(20):
        a, b, c = (random_unit(grid, rng) for _ in range(3))
        assert geodesic_distance(a, b) == pytest.approx(geodesic_distance(b, a), abs=1e-14)
        assert geodesic_distance(a, c) <= geodesic_distance(a, b) + geodesic_distance(b, c) + 1e-8


def test_log_at_base_is_zero(grid):
    one = SphereFunction.constant_one(grid)
    assert log_map(one, one).norm < 1e-12


def test_log_preserves_distance(grid, rng):
    one = SphereFunction.constant_one(grid)
    for _ in range(200):
        q = random_unit(grid, rng)
        assert log_map(q, one).norm == pytest.approx(geodesic_distance(q, one), abs=1e-8)


def test_log_closed_form(grid):
    one = SphereFunction.constant_one(grid)
    q = SphereFunction.normalized(grid, np.sqrt(2 * grid.points))
    d = geodesic_distance(q, one)
    expected = d / np.sin(d) * (q.values - np.cos(d))
    np.testing.assert_allclose(log_map(q, one).values, expected, atol=1e-12)


def test_log_outside_hemisphere_raises(grid):
    one = SphereFunction.constant_one(grid)
    far = SphereFunction.normalized(grid, np.where(grid.points < 0.5, 1.0, -1.0) + 1e-3)

    with pytest.raises(GeodesicDomainError):
        log_map(far, one)


def test_exp_of_zero_and_norm(grid, rng):
    one = SphereFunction.constant_one(grid)
    np.testing.assert_array_equal(exp_map(TangentFunction.zero(grid), one).values, one.values)
    x = TangentFunction.project(grid, rng.normal(size=grid.k))
    assert exp_map(x, one).norm == pytest.approx(1.0, abs=1e-12)


def test_exp_log_roundtrip(grid, rng):
    one = SphereFunction.constant_one(grid)
    for _ in range(50):
        q = random_unit(grid, rng)
        np.testing.assert_allclose(exp_map(log_map(q, one), one).values, q.values, atol=1e-8)


def test_phi_of_identity_is_zero(grid):
    np.testing.assert_allclose(phi(WarpingFunction.identity(grid)).values, 0.0, atol=1e-10)


def test_phi_is_mean_zero(grid):
    x = phi(WarpingFunction(grid, grid.points**2))
    assert abs(grid.integral(x.values)) <= 1e-10


def test_phi_inverse_of_zero_is_identity(grid):
    np.testing.assert_array_equal(phi_inverse(TangentFunction.zero(grid)).values, grid.points)


def test_phi_inverse_roundtrip_on_square(grid):
    gamma = WarpingFunction(grid, grid.points**2)
    assert np.max(np.abs(phi_inverse(phi(gamma)).values - gamma.values)) <= 1e-4


def test_phi_inverse_outside_domain(grid):
    p = TangentFunction.project(grid, grid.points - 0.5)
    x = TangentFunction(grid, 3.0 * p.values / p.norm)
    with pytest.raises(PhaseDomainError) as exc:
        phi_inverse(x)
    assert exc.value.min_value < 0


def test_compose_with_zero_phase_is_identity(grid):
    y = SampledCurve(grid, np.sin(2 * np.pi * grid.points))
    np.testing.assert_array_equal(compose_amplitude_phase(y, TangentFunction.zero(grid)).values, y.values)


def test_compose_constant_amplitude(grid):
    y = SampledCurve(grid, np.full(grid.k, 2.5))
    f = compose_amplitude_phase(y, phi(WarpingFunction(grid, grid.points**2)))
    np.testing.assert_allclose(f.values, 2.5, atol=1e-12)


def test_compose_recovers_warped_sine(grid):
    t = grid.points
    y = SampledCurve(grid, np.sin(2 * np.pi * t))
    f = compose_amplitude_phase(y, phi(WarpingFunction(grid, t**2)))
    np.testing.assert_allclose(f.values, np.sin(2 * np.pi * t**2), atol=1e-3)


def test_invert_and_compose_warps(grid):
    gamma = exp_warp(grid)
    both = compose_warps(gamma, invert_warp(gamma))
    np.testing.assert_allclose(both.values, grid.points, atol=1e-3)


def test_karcher_mean_single_point(grid, rng):
    q = random_unit(grid, rng)
    np.testing.assert_allclose(karcher_mean_sphere([q]).values, q.values, atol=1e-12)


def test_karcher_mean_of_antipodal_tangent_pair(grid):
    one = SphereFunction.constant_one(grid)
    p = TangentFunction.project(grid, np.cos(2 * np.pi * grid.points))
    v = 0.3 * p.values / p.norm
    pair = [exp_map(TangentFunction(grid, v), one), exp_map(TangentFunction(grid, -v), one)]
    np.testing.assert_allclose(karcher_mean_sphere(pair).values, 1.0, atol=1e-9)


def test_karcher_mean_meets_stopping_rule(grid, rng):
    points = [random_unit(grid, rng) for _ in range(10)]
    mean = karcher_mean_sphere(points, tol=1e-9)
    step = np.mean([log_map(p, mean).values for p in points], axis=0)
    assert grid.norm(step) < 1e-9


def test_karcher_mean_reports_non_convergence(grid, rng):
    points = [random_unit(grid, rng) for _ in range(5)]
    with pytest.raises(ConvergenceError) as exc:
        karcher_mean_sphere(points, tol=0.0, max_iter=2)
    assert exc.value.estimate is not None


def test_invert_warp_matches_closed_form(grid):
    a = 1.5
    expected = np.log1p(grid.points * np.expm1(a)) / a
    np.testing.assert_allclose(invert_warp(exp_warp(grid, a)).values, expected, atol=2e-5)


def test_phi_inverse_rejects_tangent_at_other_base(grid, rng):
    base = random_unit(grid, rng)
    x = TangentFunction.project(grid, 0.1 * (grid.points - 0.5), base=base)
    with pytest.raises(GridValidationError):
        phi_inverse(x)
