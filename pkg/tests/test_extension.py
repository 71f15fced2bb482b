import numpy as np
import pytest

from holobundle import extension, gauge, sampling
from holobundle.errors import BidegreeError, GeometryMismatchError
from holobundle.extension import CoadjointVector, EtaForm, ExtensionElement
from holobundle.torus import Field


@pytest.mark.parametrize("m, n", [(1, 0), (0, 1), (2, -3)])
def test_cocycle_on_plane_waves(curve, sl2, rng, m, n):
    # f = X e_k, g = Y e_-k: <f, dg> = -2 pi i tr(XY)(m ds + n dt) and
    # c dz ^ (a ds + b dt) = c (b - tau a) ds ^ dt, so Omega = 2 pi i c tr(XY)(tau m - n)
    c = 0.7 - 0.4j
    tau = curve.tau[0]
    x, y = sl2.random_element(rng), sl2.random_element(rng)
    f = Field.single_mode(curve, (m, n), x)
    g = Field.single_mode(curve, (-m, -n), y)
    expect = 2j * np.pi * c * np.trace(x @ y) * (tau * m - n)
    assert extension.cocycle(EtaForm(curve, c), f, g) == pytest.approx(expect, abs=1e-12)


def test_cocycle_vanishes_on_constants(curve, sl2, rng):
    f = Field.constant(curve, sl2.random_element(rng))
    g = sampling.random_field(curve, sl2, rng)
    assert abs(extension.cocycle(EtaForm(curve), f, g)) < 1e-13


def test_cocycle_identities(curve, sl2, rng):
    eta = EtaForm(curve, 1.3 + 0.2j)
    f, g, h = (sampling.random_field(curve, sl2, rng) for _ in range(3))
    om = extension.cocycle
    assert abs(om(eta, f, g) + om(eta, g, f)) < 1e-12
    br = lambda a, b: a @ b - b @ a
    cyc = om(eta, br(f, g), h) + om(eta, br(g, h), f) + om(eta, br(h, f), g)
    assert abs(cyc) < 1e-11


def test_extension_jacobi(curve, sl2, rng):
    eta = EtaForm(curve)
    a, b, c = (ExtensionElement(complex(*rng.standard_normal(2)), sampling.random_field(curve, sl2, rng)) for _ in range(3))
    br = lambda u, v: extension.ext_bracket(eta, u, v)
    assert (br(a, br(b, c)) + br(b, br(c, a)) + br(c, br(a, b))).max_norm() < 1e-11


def test_pairing_invariance_and_action_law(curve, sl2, rng):
    eta = EtaForm(curve, 0.5 + 1j)
    v = CoadjointVector(0.8 - 0.3j, sampling.random_form(curve, sl2, rng, 0, 1))
    a = ExtensionElement(1.5, sampling.random_field(curve, sl2, rng))
    f, h = sampling.random_gauge_map(curve, sl2, rng), sampling.random_gauge_map(curve, sl2, rng)
    lhs = extension.pairing(extension.coadjoint_act(v, f), a, eta)
    rhs = extension.pairing(v, extension.group_action_ext(eta, f, a), eta)
    assert lhs == pytest.approx(rhs, abs=1e-10)
    left = extension.group_action_ext(eta, f @ h, a)
    right = extension.group_action_ext(eta, f, extension.group_action_ext(eta, h, a))
    assert (left - right).max_norm() < 1e-10
    # the coadjoint action is a right action
    twice = extension.coadjoint_act(extension.coadjoint_act(v, f), h).xi
    assert (twice - extension.coadjoint_act(v, f @ h).xi).max_norm() < 1e-10


def test_level_zero_is_adjoint(curve, sl2, rng):
    xi = sampling.random_form(curve, sl2, rng, 0, 1)
    f = sampling.random_gauge_map(curve, sl2, rng)
    moved = extension.coadjoint_act(CoadjointVector(0.0, xi), f).xi
    assert (moved - gauge.ad_inverse_form(f, xi)).max_norm() == 0.0


def test_gram_rank(curve, sl2):
    eta = EtaForm(curve)
    r0 = extension.gram_rank(eta, sl2, 0)
    assert r0["rank"] == r0["expected_rank"] == 3
    r3 = extension.gram_rank(eta, sl2, 3)
    assert r3["full_rank"] and r3["size"] == 147
    assert r3["sigma_min"] > 1e-8 * r3["sigma_max"]
    doubled = extension.gram_rank(eta.scaled(2.0), sl2, 3)
    assert doubled["sigma_max"] == pytest.approx(2 * r3["sigma_max"])


def test_gram_cutoff_beyond_band(curve, gl1):
    with pytest.raises(ValueError, match="band"):
        extension.gram_matrix(EtaForm(curve), gl1, curve.N + 1)


def test_curve_only(surface):
    with pytest.raises(GeometryMismatchError):
        EtaForm(surface)


def test_coadjoint_vector_validation(curve, sl2, rng):
    with pytest.raises(BidegreeError):
        CoadjointVector(1.0, sampling.random_form(curve, sl2, rng, 1, 0))
    with pytest.raises(ValueError, match="real"):
        CoadjointVector(1j, sampling.random_form(curve, sl2, rng, 0, 1), real_level=True)
