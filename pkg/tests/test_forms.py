import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from holobundle import cplxstruct, forms, sampling, torus
from holobundle.errors import BidegreeError, GeometryMismatchError
from holobundle.forms import Form
from holobundle.torus import Field, TorusGeometry


def residual(form):
    return form.max_norm()


@pytest.mark.parametrize("p, q", [(0, 0), (1, 0), (0, 1), (1, 1)])
def test_d_squared_curve(curve, sl2, rng, p, q):
    a = sampling.random_form(curve, sl2, rng, p, q, degree=2)
    assert residual(forms.ext_d(forms.ext_d(a))) < 1e-11
    assert residual(forms.partial(forms.partial(a))) < 1e-11
    assert residual(forms.delbar(forms.delbar(a))) < 1e-11


@pytest.mark.parametrize("p, q", [(0, 0), (1, 0), (0, 1), (1, 1), (2, 1)])
def test_d_squared_surface(surface, sl2, rng, p, q):
    a = sampling.random_form(surface, sl2, rng, p, q, degree=2)
    scale = max(1.0, a.max_norm())
    assert residual(forms.ext_d(forms.ext_d(a))) / scale < 1e-11
    assert residual(forms.partial(forms.partial(a))) / scale < 1e-11
    assert residual(forms.delbar(forms.delbar(a))) / scale < 1e-11
    assert residual(forms.ext_d(a) - forms.partial(a) - forms.delbar(a)) == 0.0


def test_type_bookkeeping(surface, gl1, rng):
    a = sampling.random_form(surface, gl1, rng, 1, 0)
    assert a.bidegree == (1, 0)
    assert forms.delbar(a).is_type(1, 1)
    assert forms.partial(a).is_type(2, 0)
    assert forms.ext_d(a).bidegree is None  # mixed (2,0) + (1,1)


def test_wedge_dz_dzbar_on_real_frame(curve):
    tau = curve.tau[0]
    w = forms.wedge(forms.one_form(curve, dz=[1.0]), forms.one_form(curve, dzbar=[1.0]))
    # determinant convention: dz(ds) dzbar(dt) - dz(dt) dzbar(ds)
    val = w.evaluate((1, 0), (0, 1)).values[0, 0, 0, 0]
    assert val == pytest.approx(np.conj(tau) - tau)


def test_wedge_graded_commutativity(surface, gl1, rng):
    a = sampling.random_form(surface, gl1, rng, 1, 0)
    b = sampling.random_form(surface, gl1, rng, 0, 1)
    c = sampling.random_form(surface, gl1, rng, 1, 1)
    assert residual(forms.wedge(a, b) + forms.wedge(b, a)) < 1e-13
    assert residual(forms.wedge(a, c) - forms.wedge(c, a)) < 1e-13


def test_wedge_beyond_top_degree_is_zero(curve, gl1, rng):
    a = sampling.random_form(curve, gl1, rng, 1, 1)
    out = forms.wedge(a, sampling.random_form(curve, gl1, rng, 1, 0))
    assert out.degree == 3 and not out.components


def test_curvature_of_constant_real_form(curve, rng):
    a = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    b = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    omega = forms.real_one_form(curve, [Field.constant(curve, a), Field.constant(curve, b)])
    f = forms.curvature_F(omega).evaluate((1, 0), (0, 1)).values
    assert np.abs(f - (a @ b - b @ a)).max() < 1e-12


def test_real_frame_roundtrip(surface, sl2, rng):
    a = sampling.random_form(surface, sl2, rng, 1, 1)
    back = Form.from_real_frame(surface, a.to_real_frame())
    assert residual(back - a) < 1e-12


def test_cartan_formula(curve, gl1, rng):
    omega = sampling.random_one_form(curve, gl1, rng)
    X = cplxstruct._random_real_vector(curve, rng)
    Y = cplxstruct._random_real_vector(curve, rng)
    lhs = forms.ext_d(omega).evaluate(X, Y)
    rhs = (
        cplxstruct.apply_vector(X, omega.evaluate(Y))
        - cplxstruct.apply_vector(Y, omega.evaluate(X))
        - omega.evaluate(cplxstruct.lie_bracket(X, Y))
    )
    assert (lhs - rhs).max_norm() < 1e-10


def test_form_bracket_convention(curve, sl2, rng):
    a = sampling.random_one_form(curve, sl2, rng)
    b = sampling.random_one_form(curve, sl2, rng)
    X, Y = (1.0, 0.3), (-0.4, 2.0)
    ax, ay, bx, by = a.evaluate(X), a.evaluate(Y), b.evaluate(X), b.evaluate(Y)
    expect = (ax @ by - by @ ax) - (ay @ bx - bx @ ay)
    assert (forms.form_bracket(a, b).evaluate(X, Y) - expect).max_norm() < 1e-12


def test_top_form_jacobian_golden():
    c = TorusGeometry(1, (0.3 + 1.1j,), 2)
    assert forms.top_form_jacobian(c) == pytest.approx(-2.2j)
    s = TorusGeometry(2, (0.2 + 1.0j, -0.1 + 0.9j), 2)
    # dz1 dz2 dzbar1 dzbar2 = -(dz1 dzbar1)(dz2 dzbar2) = -(-2i)(-2i) Im1 Im2
    assert forms.top_form_jacobian(s) == pytest.approx(4 * 1.0 * 0.9)


def test_integrate_top_unit_square(curve):
    area = forms.real_one_form(curve, [Field.constant(curve, 1.0), None])
    top = forms.wedge(area, forms.real_one_form(curve, [None, Field.constant(curve, 1.0)]))
    assert forms.integrate_top(top) == pytest.approx(1.0)


def test_fbar_requires_01(curve, sl2, rng):
    with pytest.raises(BidegreeError):
        forms.curvature_Fbar(sampling.random_form(curve, sl2, rng, 1, 0))


def test_fbar_vanishes_on_curve(curve, sl2, rng):
    assert forms.curvature_Fbar(sampling.random_form(curve, sl2, rng, 0, 1)).max_norm() == 0.0


def test_is_holomorphic(curve):
    assert forms.is_holomorphic(forms.one_form(curve, dz=[2.0]))
    wave = Field.single_mode(curve, (1, 0))
    assert not forms.is_holomorphic(forms.one_form(curve, dz=[wave]))


def test_from_names_sign(surface):
    a = Form.from_names(surface, {("dzbar1", "dz1"): 1.0})
    b = Form.from_names(surface, {("dz1", "dzbar1"): -1.0})
    assert residual(a - b) == 0.0


def test_geometry_mismatch(curve):
    other = TorusGeometry(1, (1j,), 6)
    with pytest.raises(GeometryMismatchError):
        forms.one_form(curve, dz=[1.0]) + forms.one_form(other, dz=[1.0])


@given(st.integers(0, 2**32 - 1), st.sampled_from([(1, 0), (0, 1), (1, 1), (0, 2)]))
@settings(max_examples=15, deadline=None)
def test_json_roundtrip(seed, pq):
    g = TorusGeometry(2, (0.2 + 1.0j, 1.5j), 2)
    a = sampling.random_form(g, sampling.liealg.get_algebra("sl2"), np.random.default_rng(seed), *pq)
    text = json.dumps(forms.form_to_json(a))
    back = forms.form_from_json(json.loads(text))
    assert back.geometry == g
    assert back.bidegree == pq
    assert residual(back - a) < 1e-13


def test_json_rejects_wrong_type(curve, gl1, rng):
    obj = forms.form_to_json(sampling.random_form(curve, gl1, rng, 1, 0))
    obj["bidegree"] = [0, 1]
    with pytest.raises(BidegreeError):
        forms.form_from_json(obj)
