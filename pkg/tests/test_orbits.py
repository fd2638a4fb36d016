import math

import numpy as np
import pytest

from su2limits.errors import StateError
from su2limits.fockstate import basis_state, fidelity, make_eta, make_from_amplitudes, make_noon
from su2limits.majorana import OrbitRelation, same_orbit
from su2limits.orbits import (
    N_BUCKETS,
    batch_orbit_amplitudes,
    bucket_width,
    is_uniform,
    n3_grid,
    orbit_state,
    orbit_state_n2,
    orbit_state_n3,
    sweep_n2,
    sweep_n3,
    variance_polygon,
)
from su2limits.stokes import check_bounds, covariance, principal_variances

OVERLAP_STATE = (0, 0.5704, 0.7914, 0.2199)


def _lam(state):
    return principal_variances(covariance(state)).lambdas


def test_n2_generator_extremes():
    assert fidelity(orbit_state_n2(0.0), basis_state(2, 2)) == pytest.approx(1, abs=1e-15)
    assert fidelity(orbit_state_n2(math.pi), basis_state(2, 1)) == pytest.approx(1, abs=1e-15)
    np.testing.assert_allclose(_lam(orbit_state_n2(0.0)), [0, 2, 2], atol=1e-12)
    np.testing.assert_allclose(_lam(orbit_state_n2(math.pi)), [0, 4, 4], atol=1e-12)


def test_n2_midpoint_trace():
    # Stokes vector (4/3, 0, 4/3) by hand, so the trace is 8 - 32/9
    assert covariance(orbit_state_n2(math.pi / 2)).trace == pytest.approx(8 - 32 / 9, abs=1e-12)


def test_n2_range_checked():
    with pytest.raises(ValueError):
        orbit_state_n2(4.0)
    with pytest.raises(ValueError):
        orbit_state(3, [0.1])


def test_n3_generator_examples():
    assert covariance(orbit_state_n3(0, 0, 0)).trace == pytest.approx(6, abs=1e-12)
    t = math.radians(107.5)
    lam = _lam(orbit_state_n3(t, t, math.radians(115.47)))
    np.testing.assert_allclose(lam, [3, 3, 3], atol=2e-3)
    assert same_orbit(orbit_state_n3(t, t, math.radians(115.4681)), make_eta(3), tol=1e-3) is OrbitRelation.SAME
    assert covariance(orbit_state_n3(2 * math.pi / 3, 2 * math.pi / 3, math.pi)).trace <= 15 + 1e-12


def test_batch_matches_single(rng):
    params = rng.uniform(0, math.pi, size=(20, 3))
    amps = batch_orbit_amplitudes(3, params)
    for row, p in zip(amps, params):
        single = orbit_state_n3(*p)
        assert abs(np.vdot(single.amplitudes, row)) ** 2 == pytest.approx(1, abs=1e-13)


def test_polygon_kinds():
    point = variance_polygon(make_eta(3))
    assert point.kind == "point"
    np.testing.assert_allclose(point.vertices, [[3, 3, 3]], atol=1e-9)
    tri = variance_polygon(basis_state(2, 2))
    assert tri.kind == "triangle"
    assert {tuple(np.round(v, 9)) for v in tri.vertices} == {(2, 2, 0), (2, 0, 2), (0, 2, 2)}
    hexagon = variance_polygon(make_from_amplitudes(3, OVERLAP_STATE))
    assert hexagon.kind == "hexagon" and len(hexagon.vertices) == 6
    for v in hexagon.vertices:
        np.testing.assert_allclose(sorted(v), [1.1637, 1.8990, 5.9373], atol=2e-3)


def test_uniformity():
    assert is_uniform(make_eta(3))
    assert not is_uniform(make_noon(3))
    np.testing.assert_allclose(_lam(make_noon(3)), [3, 3, 9], atol=1e-12)
    for theta in np.linspace(0, math.pi, 50):
        assert not is_uniform(orbit_state_n2(theta))


def test_sweep_n2_resolution_two():
    cloud = sweep_n2(2)
    np.testing.assert_allclose(cloud.traces, [4, 8], atol=1e-12)


def test_sweep_n2_properties():
    cloud = sweep_n2(513)
    assert cloud.trace_range[0] == pytest.approx(4, abs=1e-12)
    assert cloud.trace_range[1] == pytest.approx(8, abs=1e-12)
    assert np.all(np.diff(cloud.traces) >= 0)
    np.testing.assert_allclose(cloud.traces + cloud.stokes_norm2, 8, atol=1e-9)
    for lam in cloud.lambdas[::16]:
        assert all(c.passed for c in check_bounds(lam, 2).values())
    for lam in cloud.lambdas:
        poly_kind = len({tuple(p) for p in np.round(np.array(list(__import__("itertools").permutations(lam))), 7)})
        assert poly_kind in (1, 3, 6)


def test_resolution_validation():
    with pytest.raises(StateError, match="resolution must be >= 2"):
        sweep_n2(1)
    with pytest.raises(StateError):
        n3_grid(5, 1)


def test_n3_grid_layout():
    g = n3_grid(3, 4)
    assert g.shape == (36, 3)
    np.testing.assert_allclose(g[:4, 2], np.linspace(0, math.pi, 4))
    assert np.all(np.diff(g[:, 0]) >= 0)
    full = n3_grid(3, 4, full_phi=True)
    assert full[:, 2].max() < 2 * math.pi


@pytest.fixture(scope="module")
def small_n3():
    return sweep_n3(24, 12)


def test_sweep_n3_small(small_n3):
    lo, hi = small_n3.trace_range
    assert lo == pytest.approx(6, abs=1e-12)
    assert 14 < hi <= 15 + 1e-9
    assert small_n3.params.shape == (24 * 24 * 12, 3)
    assert small_n3.bucket_width == pytest.approx(9 / N_BUCKETS)
    assert bucket_width(2) == pytest.approx(4 / N_BUCKETS)


def test_slices_contain_their_samples(small_n3):
    for key, s in list(small_n3.slice_hulls.items())[::10]:
        inside = (small_n3.traces >= s.trace_lo) & (small_n3.traces <= s.trace_hi)
        for lam in small_n3.lambdas[inside][:50]:
            for perm in ((0, 1, 2), (2, 0, 1), (1, 2, 0)):
                assert small_n3.outside_margin(lam[list(perm)]) <= 1e-9


def test_csv_layout(small_n3):
    points = small_n3.points_csv().splitlines()
    assert points[0] == "param1,param2,param3,lam1,lam2,lam3,trace"
    assert len(points) == small_n3.n_samples + 1
    hulls = small_n3.hulls_csv().splitlines()
    assert hulls[0] == "trace,vx,vy,vz"
    n2 = sweep_n2(4).points_csv().splitlines()
    assert n2[1].startswith("0,,,")


def test_thread_count_does_not_change_results():
    a = sweep_n3(20, 10, threads=1)
    b = sweep_n3(20, 10, threads=4)
    assert np.array_equal(a.lambdas, b.lambdas)
    assert a.points_csv() == b.points_csv() and a.hulls_csv() == b.hulls_csv()
