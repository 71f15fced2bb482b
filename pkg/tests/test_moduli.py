from itertools import permutations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from holobundle import moduli
from holobundle.errors import NotCommutingError
from holobundle.moduli import CommutingPair, TorusPair

angles = st.lists(st.floats(0, 2 * np.pi, allow_nan=False, exclude_max=True), min_size=2, max_size=4)


def special_phases(a):
    a = np.array(a)
    a[-1] = -a[:-1].sum()
    return np.exp(1j * a)


@given(angles, st.data())
@settings(max_examples=80, deadline=None)
def test_canonical_form_is_permutation_invariant(th, data):
    n = len(th)
    ph = data.draw(st.lists(st.floats(0, 6.28, allow_nan=False), min_size=n, max_size=n))
    t = TorusPair(special_phases(th), special_phases(ph))
    perm = data.draw(st.permutations(range(n)))
    a = moduli.weyl_canonicalize(t)
    b = moduli.weyl_canonicalize(t.permuted(perm))
    assert np.array_equal(a.rep.theta, b.rep.theta) and np.array_equal(a.rep.phi, b.rep.phi)
    again = moduli.weyl_canonicalize(a.rep)
    assert np.array_equal(again.rep.theta, a.rep.theta)


def test_exhaustive_permutations_with_repeated_theta():
    t = TorusPair(np.exp(1j * np.array([0.5, 0.5, -1.0])), np.exp(1j * np.array([2.0, -1.0, -1.0])))
    reps = {moduli.weyl_canonicalize(t.permuted(p)).orbit_hash() for p in permutations(range(3))}
    assert len(reps) == 1


@pytest.mark.parametrize("n", [2, 3, 4])
@pytest.mark.parametrize("degenerate", [False, True])
def test_conjugation_invariance(n, degenerate, rng):
    for _ in range(10):
        p = moduli.random_commuting_pair(n, rng, degenerate)
        u = moduli.random_special_unitary(n, rng)
        assert moduli.orbits_equal(p, p.conjugate(u))
        assert moduli.orbit_class(p).orbit_hash() == moduli.orbit_class(p.conjugate(u)).orbit_hash()


def test_torus_reduce_diagonalizes(rng):
    p = moduli.random_commuting_pair(3, rng, degenerate=True)
    t, u = moduli.torus_reduce(p)
    assert np.allclose(u.conj().T @ p.x @ u, np.diag(t.theta), atol=1e-10)
    assert np.allclose(u.conj().T @ p.y @ u, np.diag(t.phi), atol=1e-10)
    assert t.special


def test_known_phases_recovered(rng):
    th = np.exp(1j * np.array([0.3, 2.0, -2.3]))
    ph = np.exp(1j * np.array([1.0, 1.0, -2.0]))
    u = moduli.random_unitary(3, rng)
    p = CommutingPair(u @ np.diag(th) @ u.conj().T, u @ np.diag(ph) @ u.conj().T)
    theta_angle = moduli.orbit_class(p).to_dict()["theta_angle"]
    assert np.allclose(theta_angle, sorted(np.mod([0.3, 2.0, -2.3], 2 * np.pi)))


def test_distinct_orbits_separate(rng):
    p = moduli.random_commuting_pair(2, rng)
    q = CommutingPair(-p.x, p.y)
    assert not moduli.orbits_equal(p, q)


def test_identity_pair_angle_snapping():
    p = CommutingPair(np.eye(2) * np.exp(-1e-9j), np.eye(2))
    assert moduli.orbit_class(p).to_dict()["theta_angle"] == [0.0, 0.0]


def test_not_commuting():
    with pytest.raises(NotCommutingError, match="not simultaneously diagonalizable"):
        CommutingPair(np.array([[0, 1], [1, 0]]), np.diag([1, -1]))


def test_non_normal_commuting_pair_rejected():
    jordan = np.array([[1, 1], [0, 1.0]])
    with pytest.raises(NotCommutingError):
        moduli.torus_reduce(CommutingPair(jordan, np.eye(2)))


def test_torus_pair_validation():
    with pytest.raises(ValueError, match="unit modulus"):
        TorusPair([2.0, 0.5], [1.0, 1.0])
    with pytest.raises(ValueError, match="multiply to 1"):
        TorusPair([1j, 1j], [1.0, 1.0])


def test_matrix_from_json_formats():
    m = np.array([[1 + 2j, 0], [0, 1 - 2j]])
    a = moduli.matrix_from_json({"re": m.real.tolist(), "im": m.imag.tolist()})
    b = moduli.matrix_from_json(np.stack([m.real, m.imag], axis=-1).tolist())
    assert np.array_equal(a, m) and np.array_equal(b, m)
