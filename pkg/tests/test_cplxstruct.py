import numpy as np
import pytest

from holobundle import cplxstruct, forms, sampling
from holobundle.cplxstruct import ComplexStructure, InvariantField
from holobundle.errors import BidegreeError


def random_invariant(g, n, rng):
    return InvariantField(g, cplxstruct._random_real_vector(g, rng), cplxstruct._random_matrix_field(g, n, rng))


def test_I_squares_to_minus_identity(surface, sl2, rng):
    S = ComplexStructure(sampling.random_form(surface, sl2, rng, 0, 1))
    a = random_invariant(surface, 2, rng)
    assert (cplxstruct.apply_I(S, cplxstruct.apply_I(S, a)) + a).max_norm() < 1e-12


def test_J_squares_to_minus_identity(surface, rng):
    X = cplxstruct._random_real_vector(surface, rng)
    JJ = cplxstruct.apply_J(surface, cplxstruct.apply_J(surface, X))
    assert max((a + b).max_norm() for a, b in zip(JJ, X)) < 1e-13


def test_semidirect_bracket_jacobi(curve, sl2, rng):
    a, b, c = (random_invariant(curve, 2, rng) for _ in range(3))
    br = cplxstruct.semidirect_bracket
    jac = br(a, br(b, c)) + br(b, br(c, a)) + br(c, br(a, b))
    assert jac.max_norm() < 1e-9
    assert (br(a, b) + br(b, a)).max_norm() < 1e-12


@pytest.mark.parametrize("a, b", [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)])
def test_torsion_is_minus_four_fbar_on_frames(surface, sl2, rng, a, b):
    S = ComplexStructure(sampling.random_form(surface, sl2, rng, 0, 1))
    nt = cplxstruct.torsion(S, InvariantField.frame(surface, a, 2), InvariantField.frame(surface, b, 2))
    fbar = forms.curvature_Fbar(S.omega).evaluate(np.eye(4)[a], np.eye(4)[b])
    assert nt.base_norm() < 1e-12
    assert (nt.h + fbar * 4).max_norm() < 1e-9


def test_torsion_tensorial_on_varying_fields(surface, sl2, rng):
    S = ComplexStructure(sampling.random_form(surface, sl2, rng, 0, 1))
    assert cplxstruct.torsion_general_report(S, rng, samples=2) < 1e-9


def test_mixed_torsion_vanishes(surface, sl2, rng):
    S = ComplexStructure(sampling.random_form(surface, sl2, rng, 0, 1))
    x = InvariantField.base(surface, cplxstruct._random_real_vector(surface, rng), 2)
    f = InvariantField.fiber(cplxstruct._random_matrix_field(surface, 2, rng))
    h = InvariantField.fiber(cplxstruct._random_matrix_field(surface, 2, rng))
    assert cplxstruct.torsion(S, x, f).max_norm() < 1e-9
    assert cplxstruct.torsion(S, f, h).max_norm() < 1e-9


def test_exact_hmc_solution_is_integrable(surface, sl2, rng):
    omega, _ = sampling.holomorphic_free_exact(surface, sl2, rng)
    report = cplxstruct.integrability_check(ComplexStructure(omega), rng=rng)
    assert report["verdict"] == "integrable"
    assert report["criteria_agree"]


def test_generic_form_is_not_integrable(surface, sl2, rng):
    report = cplxstruct.integrability_check(ComplexStructure(sampling.random_form(surface, sl2, rng, 0, 1)))
    assert report["verdict"] == "non-integrable"
    assert report["criteria_agree"]
    assert report["torsion_frame_max"] > 1e-3


def test_curve_structures_are_integrable(curve, sl2, rng):
    S = ComplexStructure(sampling.random_form(curve, sl2, rng, 0, 1, scale=5.0))
    assert cplxstruct.integrability_check(S, rng=rng)["verdict"] == "integrable"


def test_consequence_probe(surface, sl2, rng):
    omega = sampling.random_form(surface, sl2, rng, 0, 1)
    probe = cplxstruct.consequence_report(omega, rng, samples=1)
    assert probe["type_10"] < 1e-10
    assert set(probe) == {"real_constant", "real_varying", "type_10"}


def test_holomorphic_vector_is_type_10(curve):
    Z = cplxstruct.holomorphic_vector(curve, 0, 1.0)
    dzbar = forms.one_form(curve, dzbar=[1.0])
    dz = forms.one_form(curve, dz=[1.0])
    assert dzbar.evaluate(Z).max_norm() < 1e-14
    assert np.allclose(dz.evaluate(Z).values, 1.0)


def test_structure_needs_01(curve, sl2, rng):
    with pytest.raises(BidegreeError):
        ComplexStructure(sampling.random_form(curve, sl2, rng, 1, 0))
