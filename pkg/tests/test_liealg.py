import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from holobundle import liealg
from holobundle.errors import AlgebraMismatchError, LogBranchError, SingularElementError

finite = st.floats(-3, 3, allow_nan=False, allow_infinity=False)


@given(arrays(float, (2, 3, 3), elements=finite))
@settings(max_examples=60, deadline=None)
def test_expm_matches_scipy(parts):
    x = parts[0] + 1j * parts[1]
    assert np.allclose(liealg.expm(x), scipy.linalg.expm(x), rtol=1e-12, atol=1e-12 * np.abs(scipy.linalg.expm(x)).max())


def test_expm_batched_mixed_norms(rng):
    xs = rng.standard_normal((5, 2, 2)) * np.array([1e-6, 0.1, 1.0, 10.0, 40.0])[:, None, None]
    ref = np.stack([scipy.linalg.expm(x) for x in xs])
    err = np.abs(liealg.expm(xs) - ref).max(axis=(1, 2)) / np.abs(ref).max(axis=(1, 2))
    assert err.max() < 1e-12


@given(arrays(float, (2, 2, 2), elements=st.floats(-1, 1, allow_nan=False)))
@settings(max_examples=60, deadline=None)
def test_log_inverts_exp_near_identity(parts):
    x = parts[0] + 1j * parts[1]
    assert np.allclose(liealg.logm(liealg.expm(x)), x, atol=1e-11)


def test_logm_matches_scipy(rng):
    g = liealg.expm(rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3)))
    assert np.allclose(liealg.logm(g), scipy.linalg.logm(g), atol=1e-10)


def test_logm_branch_cut():
    with pytest.raises(LogBranchError):
        liealg.logm(np.diag([-1.0, -1.0]))


def test_singular_group_element():
    with pytest.raises(SingularElementError):
        liealg.check_invertible(np.zeros((2, 2)))


def test_bracket_shape_mismatch():
    with pytest.raises(AlgebraMismatchError):
        liealg.bracket(np.eye(2), np.eye(3))


def test_dexp_left_finite_difference(rng):
    x = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    dx = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    eps = 1e-6
    fd = (scipy.linalg.expm(x + eps * dx) - scipy.linalg.expm(x - eps * dx)) / (2 * eps)
    ref = np.linalg.solve(scipy.linalg.expm(x), fd)
    assert np.allclose(liealg.dexp_left(x, dx), ref, atol=1e-7)


@pytest.mark.parametrize("name, ratio", [("sl2", 4), ("su2", 4), ("sl3", 6), ("su3", 6), ("su4", 8)])
def test_killing_ratio(name, ratio):
    assert liealg.get_algebra(name).killing_ratio() == pytest.approx(ratio)


def test_gl1_is_abelian_without_killing_ratio():
    alg = liealg.get_algebra("gl1")
    assert alg.is_abelian and alg.killing_ratio() is None


@pytest.mark.parametrize("name, dim", [("gl1", 1), ("sl2", 3), ("sl3", 8), ("su3", 8)])
def test_dimensions_and_jacobi(name, dim, rng):
    alg = liealg.get_algebra(name)
    assert alg.dim == dim
    a, b, c = (alg.random_element(rng) for _ in range(3))
    br = liealg.bracket
    jac = br(a, br(b, c)) + br(b, br(c, a)) + br(c, br(a, b))
    assert np.abs(jac).max() < 1e-13
    assert alg.contains(br(a, b))


def test_coords_roundtrip(sl2, rng):
    x = sl2.random_element(rng)
    assert np.allclose(sl2.element(sl2.coords(x)), x)


def test_from_basis_rejects_non_closed():
    with pytest.raises(ValueError, match="not closed"):
        liealg.from_basis("bad", [[[0, 1], [0, 0]], [[0, 0], [1, 0]]])


def test_unknown_algebra_lists_available():
    with pytest.raises(KeyError, match="available: gl1"):
        liealg.get_algebra("e8")
