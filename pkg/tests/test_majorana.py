import math

import numpy as np
import pytest
from hypothesis import assume, given, settings

from su2limits.errors import PhotonNumberMismatch
from su2limits.fockstate import (
    basis_state,
    fidelity,
    make_eta,
    make_from_amplitudes,
    make_noon,
    make_su2_coherent,
)
from su2limits.majorana import (
    MajoranaConstellation,
    OrbitRelation,
    canonicalize,
    from_constellation,
    orbit_relation,
    pairwise_angles,
    same_orbit,
    to_constellation,
    unit_vector,
)
from su2limits.stokes import covariance, principal_variances
from su2limits.su2rot import EulerAngles, apply_rotation, induced_so3

from conftest import eulers, random_euler, random_state, states

OVERLAP_STATE = (0, 0.5704, 0.7914, 0.2199)


def _multiset_distance(a, b):
    va, vb = a.vectors(), b.vectors()
    cost = np.arccos(np.clip(va @ vb.T, -1, 1))
    from scipy.optimize import linear_sum_assignment

    r, c = linear_sum_assignment(cost)
    return cost[r, c].max()


def test_north_pole_stack():
    c = to_constellation(basis_state(2, 2))
    assert c.points == ((0.0, 0.0), (0.0, 0.0))


def test_south_pole_from_missing_top_degree():
    c = to_constellation(basis_state(3, 0))
    assert all(t == math.pi for t, _ in c.points)
    mixed = to_constellation(basis_state(3, 1))
    assert sorted(t for t, _ in mixed.points) == [0.0, math.pi, math.pi]


def test_noon3_equator():
    c = to_constellation(make_noon(3))
    assert all(abs(t - math.pi / 2) < 1e-12 for t, _ in c.points)
    np.testing.assert_allclose(pairwise_angles(c), [2 * math.pi / 3] * 3, atol=1e-12)


def test_coherent_state_points_coincide():
    for n in (2, 3, 5, 8):
        c = to_constellation(make_su2_coherent(n, 1.1, 2.3))
        for t, p in c.points:
            assert abs(t - 1.1) < 1e-12 and abs(p - 2.3) < 1e-12


def test_from_constellation_examples():
    up = from_constellation(MajoranaConstellation(((0.0, 0.0), (0.0, 0.0))))
    np.testing.assert_allclose(up.amplitudes, [0, 0, 1], atol=1e-15)
    pair = from_constellation(MajoranaConstellation(((math.pi / 2, 0.0), (math.pi / 2, math.pi))))
    lam = principal_variances(covariance(pair)).lambdas
    np.testing.assert_allclose(lam, [0, 4, 4], atol=1e-12)


def test_eta3_canonical_angles():
    canon, euler = canonicalize(to_constellation(make_eta(3)))
    deg = canon.degrees()
    assert deg[0] == (0.0, 0.0)
    meridian = [p for p in deg[1:] if p[1] == 0.0]
    other = [p for p in deg[1:] if p[1] != 0.0]
    assert len(meridian) == 1 and len(other) == 1
    assert abs(meridian[0][0] - 107.5) < 0.1 and abs(other[0][0] - 107.5) < 0.1
    assert abs(other[0][1] - 115.47) < 0.05
    state = from_constellation(canon)
    np.testing.assert_allclose(covariance(state).gamma, 3 * np.eye(3), atol=1e-6)
    # the returned Euler angles realize the canonical frame
    moved = to_constellation(apply_rotation(make_eta(3), euler))
    assert _multiset_distance(moved, canon) < 1e-7


def test_canonicalize_two_stacked_points():
    c = MajoranaConstellation(((1.0, 2.0), (1.0, 2.0)))
    canon, _ = canonicalize(c)
    assert canon.points == ((0.0, 0.0), (0.0, 0.0))


def test_canonicalize_noon2():
    canon, _ = canonicalize(to_constellation(make_noon(2)))
    assert canon.points[0] == (0.0, 0.0)
    assert canon.points[1][0] == pytest.approx(math.pi)


@settings(max_examples=40, deadline=None)
@given(states(2, 6), eulers())
def test_canonical_form_is_rotation_invariant(s, e):
    a, _ = canonicalize(to_constellation(s))
    b, _ = canonicalize(to_constellation(apply_rotation(s, e)))
    assert a.points[0] == (0.0, 0.0) and b.points[0] == (0.0, 0.0)
    # pairwise geometry survives canonicalization
    np.testing.assert_allclose(pairwise_angles(a), pairwise_angles(to_constellation(s)), atol=1e-7)


@pytest.mark.parametrize("n", range(1, 9))
def test_roundtrip_fidelity(rng, n):
    for _ in range(50):
        s = random_state(rng, n)
        assert fidelity(from_constellation(to_constellation(s)), s) >= 1 - 1e-9


@settings(max_examples=60, deadline=None)
@given(states(1, 6), eulers())
def test_rotation_moves_points_rigidly(s, e):
    before = to_constellation(s)
    # a near-coincident group of k points is only defined to ~eps**(1/k) by the
    # amplitudes, so the 1e-7 check applies to separated constellations
    assume(s.n_photons == 1 or pairwise_angles(before)[0] > 1e-2)
    after = to_constellation(apply_rotation(s, e))
    assert _multiset_distance(before.rotated(induced_so3(e)), after) < 1e-7
    np.testing.assert_allclose(pairwise_angles(before), pairwise_angles(after), atol=1e-9)


@pytest.mark.parametrize("theta", [1e-6, 1e-4, math.pi - 1e-4, math.pi - 1e-6])
def test_coherent_cluster_near_pole(theta):
    c = to_constellation(make_su2_coherent(3, theta, 0.7))
    for t, _ in c.points:
        assert abs(t - theta) < 1e-10
    assert same_orbit(make_su2_coherent(3, theta, 0.7), basis_state(3, 3)) is OrbitRelation.SAME


def test_double_point_near_south_pole_after_small_rotation():
    s = apply_rotation(basis_state(2, 0), EulerAngles(0, 1e-5, 0))
    assert pairwise_angles(to_constellation(s))[0] < 1e-12


def test_point_coordinates():
    np.testing.assert_allclose(unit_vector(math.pi / 2, math.pi / 2), [0, 1, 0], atol=1e-16)
    np.testing.assert_allclose(unit_vector(math.pi, 0), [0, 0, -1], atol=1e-15)


def test_csv_roundtrip():
    c = to_constellation(make_noon(3))
    text = c.to_csv()
    assert text.splitlines()[0] == "theta_rad,phi_rad"
    back = MajoranaConstellation.from_csv(text)
    assert _multiset_distance(back, c) < 1e-7
    with pytest.raises(ValueError):
        MajoranaConstellation.from_csv("t,p\n0,0\n")


def test_same_orbit_examples():
    assert same_orbit(basis_state(2, 1), make_noon(2)) is OrbitRelation.SAME
    overlap_state = make_from_amplitudes(3, OVERLAP_STATE)
    assert same_orbit(make_eta(3), overlap_state) is OrbitRelation.DIFFERENT
    with pytest.raises(PhotonNumberMismatch):
        same_orbit(make_noon(2), make_noon(3))


def test_self_witness_is_identity(rng):
    s = random_state(rng, 4)
    rel, witness = orbit_relation(s, s)
    assert rel is OrbitRelation.SAME
    np.testing.assert_allclose(induced_so3(witness), np.eye(3), atol=1e-9)


def test_witness_rotates_a_onto_b(rng):
    for n in (2, 3, 5):
        a = random_state(rng, n)
        b = apply_rotation(a, random_euler(rng))
        rel, witness = orbit_relation(a, b)
        assert rel is OrbitRelation.SAME
        assert fidelity(apply_rotation(a, witness), b) > 1 - 1e-10


def test_coherent_states_share_one_orbit():
    for n in (2, 3, 5, 8):
        assert same_orbit(make_su2_coherent(n, 0.2, 0.1), make_su2_coherent(n, 2.5, 4.0)) is OrbitRelation.SAME


@settings(max_examples=30, deadline=None)
@given(states(2, 5), eulers(), eulers())
def test_same_orbit_reflexive_symmetric_and_rotation_invariant(s, e1, e2):
    t = apply_rotation(s, e1)
    assert same_orbit(s, s) is OrbitRelation.SAME
    assert same_orbit(s, t) is OrbitRelation.SAME
    assert same_orbit(t, s) is OrbitRelation.SAME
    assert same_orbit(apply_rotation(t, e2), s) is OrbitRelation.SAME


def test_mirror_only_for_chiral_constellation():
    chiral = MajoranaConstellation(((0.0, 0.0), (1.2, 0.0), (2.0, 1.0)))
    a = from_constellation(chiral)
    b = from_constellation(chiral.mirrored())
    np.testing.assert_allclose(
        principal_variances(covariance(a)).lambdas, principal_variances(covariance(b)).lambdas, atol=1e-10
    )
    assert same_orbit(a, b) is OrbitRelation.MIRROR_ONLY
    # an achiral constellation is its own mirror up to rotation
    flat = MajoranaConstellation(((0.0, 0.0), (1.2, 0.0), (2.0, 0.0)))
    assert same_orbit(from_constellation(flat), from_constellation(flat.mirrored())) is OrbitRelation.SAME
