"""Registered verification scenarios.

Each scenario draws ``samples`` seeded inputs, evaluates a family of
identities and records one :class:`~holobundle.report.Check` per identity,
holding the worst residual over the ensemble.  Residuals of non-linear
identities are relative: ``|lhs - rhs| / max(1, |rhs|)`` with max-norms over
the grid.
"""

from __future__ import annotations

import time
from itertools import combinations, permutations

import numpy as np

from . import cplxstruct, extension, forms, gauge, liealg, moduli, periods, sampling
from .config import SCENARIO_SPECS, ScenarioSpec
from .errors import CurvatureObstructionError, HolobundleError
from .report import Report
from .torus import Field

REGISTRY = {}


def scenario(name, spec):
    def wrap(fn):
        REGISTRY[name] = fn
        SCENARIO_SPECS[name] = spec
        return fn

    return wrap


def sample_rngs(seed, count):
    """Independent generators for ``count`` samples, derived from one seed."""
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(count)]


def rel(diff, ref):
    return float(diff) / max(1.0, float(ref))


class _Worst:
    """Running maximum per check name."""

    def __init__(self):
        self.values = {}

    def update(self, name, value):
        self.values[name] = max(self.values.get(name, 0.0), float(value))

    def emit(self, report, cfg, builtin):
        for name, tol in builtin.items():
            report.add(name, self.values.get(name, 0.0), cfg.tol(name, tol))


# 1 -----------------------------------------------------------------------

@scenario("calculus-identities", ScenarioSpec(default_d=2))
def calculus_identities(cfg, report):
    g, alg = cfg.geometry, cfg.algebra
    worst = _Worst()
    d = g.d
    for rng in sample_rngs(cfg.seed, cfg.samples):
        for p in range(d + 1):
            for q in range(d + 1):
                a = sampling.random_form(g, alg, rng, p, q, degree=2)
                scale = a.max_norm()
                worst.update("d_squared", rel(forms.ext_d(forms.ext_d(a)).max_norm(), scale))
                worst.update("del_squared", rel(forms.partial(forms.partial(a)).max_norm(), scale))
                worst.update("delbar_squared", rel(forms.delbar(forms.delbar(a)).max_norm(), scale))
                split = forms.ext_d(a) - forms.partial(a) - forms.delbar(a)
                worst.update("d_split", rel(split.max_norm(), scale))
    worst.emit(report, cfg, {"d_squared": 1e-11, "del_squared": 1e-11, "delbar_squared": 1e-11, "d_split": 1e-11})


# 2 -----------------------------------------------------------------------

@scenario("gauge-covariance", ScenarioSpec(default_d=2))
def gauge_covariance(cfg, report):
    g, alg = cfg.geometry, cfg.algebra
    worst = _Worst()
    for rng in sample_rngs(cfg.seed, cfg.samples):
        w = sampling.random_one_form(g, alg, rng)
        f = sampling.random_gauge_map(g, alg, rng)
        rhs = gauge.ad_inverse_form(f, forms.curvature_F(w))
        lhs = forms.curvature_F(gauge.act_star(w, f))
        worst.update("F_covariance", rel((lhs - rhs).max_norm(), rhs.max_norm()))
        xi = w.part(0, 1)
        rhs = gauge.ad_inverse_form(f, forms.curvature_Fbar(xi))
        lhs = forms.curvature_Fbar(gauge.act_bullet(xi, f))
        worst.update("Fbar_covariance", rel((lhs - rhs).max_norm(), rhs.max_norm()))
    worst.emit(report, cfg, {"F_covariance": 1e-8, "Fbar_covariance": 1e-8})


# 3 -----------------------------------------------------------------------

@scenario("right-action", ScenarioSpec(default_d=2))
def right_action(cfg, report):
    g, alg = cfg.geometry, cfg.algebra
    worst = _Worst()
    for rng in sample_rngs(cfg.seed, cfg.samples):
        w = sampling.random_one_form(g, alg, rng)
        f = sampling.random_gauge_map(g, alg, rng)
        h = sampling.random_gauge_map(g, alg, rng)
        fh = f @ h
        ref = gauge.act_star(w, fh)
        diff = gauge.act_star(gauge.act_star(w, f), h) - ref
        worst.update("star_right_action", rel(diff.max_norm(), ref.max_norm()))
        xi = w.part(0, 1)
        ref = gauge.act_bullet(xi, fh)
        diff = gauge.act_bullet(gauge.act_bullet(xi, f), h) - ref
        worst.update("bullet_right_action", rel(diff.max_norm(), ref.max_norm()))
        split = gauge.act_star(xi, f) - gauge.act_bullet(xi, f) - gauge.log_deriv_partial(f)
        worst.update("star_bullet_split", rel(split.max_norm(), ref.max_norm()))
        prod = gauge.log_deriv_left(fh) - (
            gauge.ad_inverse_form(h, gauge.log_deriv_left(f)) + gauge.log_deriv_left(h)
        )
        worst.update("product_rule", rel(prod.max_norm(), gauge.log_deriv_left(fh).max_norm()))
    worst.emit(
        report,
        cfg,
        {"star_right_action": 1e-9, "bullet_right_action": 1e-9, "star_bullet_split": 1e-10, "product_rule": 1e-9},
    )


# 4 -----------------------------------------------------------------------

@scenario("torsion-hmc", ScenarioSpec(default_d=2, default_samples=50))
def torsion_hmc(cfg, report):
    """Torsion on constant frames versus ``-4 Fbar``, and agreement of the two verdicts.

    Even samples use ``omega = gamma^-1 delbar gamma`` (solutions of ``Fbar = 0``),
    odd samples a random ``(0, 1)``-form.
    """
    g, alg = cfg.geometry, cfg.algebra
    worst = _Worst()
    verdict_tol = cfg.tol("verdict_threshold", 1e-7)
    disagreements = 0
    verdicts = {"integrable": 0, "non-integrable": 0}
    consequence = {}
    for i, rng in enumerate(sample_rngs(cfg.seed, cfg.samples)):
        if i % 2 == 0:
            omega, _ = sampling.holomorphic_free_exact(g, alg, rng)
        else:
            omega = sampling.random_form(g, alg, rng, 0, 1)
        st = cplxstruct.ComplexStructure(omega)
        fbar = forms.curvature_Fbar(omega).max_norm()
        for a, b in combinations(range(g.ndim_real), 2):
            worst.update(
                "torsion_fbar_proportionality", rel(cplxstruct.torsion_fbar_residual(st, a, b), fbar)
            )
        rep = cplxstruct.integrability_check(st, tol=verdict_tol, rng=rng)
        disagreements += 0 if rep["criteria_agree"] else 1
        verdicts[rep["verdict"]] += 1
        if g.d == 1:
            worst.update("curve_torsion", rep["torsion_max"])
        if i < 2:
            for k, v in cplxstruct.consequence_report(omega, rng).items():
                consequence[k] = max(consequence.get(k, 0.0), v)
            consequence["torsion_general_fields"] = max(
                consequence.get("torsion_general_fields", 0.0), cplxstruct.torsion_general_report(st, rng)
            )
    builtin = {"torsion_fbar_proportionality": 1e-8}
    if g.d == 1:
        builtin["curve_torsion"] = verdict_tol
    worst.emit(report, cfg, builtin)
    report.add("verdict_disagreements", disagreements, 1)
    report.details["verdict_counts"] = verdicts
    report.details["consequence_probe"] = consequence


# 5 -----------------------------------------------------------------------

@scenario("mixed-torsion", ScenarioSpec(default_d=2))
def mixed_torsion(cfg, report):
    g, alg = cfg.geometry, cfg.algebra
    worst = _Worst()
    for rng in sample_rngs(cfg.seed, cfg.samples):
        omega = sampling.random_form(g, alg, rng, 0, 1)
        st = cplxstruct.ComplexStructure(omega)
        X = tuple(rng.standard_normal(g.ndim_real))
        base = cplxstruct.InvariantField.base(g, X, alg.n)
        f = cplxstruct.InvariantField.fiber(sampling.random_field(g, alg, rng))
        h = cplxstruct.InvariantField.fiber(sampling.random_field(g, alg, rng))
        worst.update("torsion_base_fiber", cplxstruct.torsion(st, base, f).max_norm())
        worst.update("torsion_fiber_fiber", cplxstruct.torsion(st, f, h).max_norm())
        A = cplxstruct.InvariantField(g, tuple(rng.standard_normal(g.ndim_real)), f.h)
        worst.update("I_squared", rel((cplxstruct.apply_I(st, cplxstruct.apply_I(st, A)) + A).max_norm(), A.max_norm()))
    worst.emit(report, cfg, {"torsion_base_fiber": 1e-9, "torsion_fiber_fiber": 1e-9, "I_squared": 1e-11})


# 6 -----------------------------------------------------------------------

@scenario("period-recovery", ScenarioSpec(default_d=1))
def period_recovery(cfg, report):
    g, alg = cfg.geometry, cfg.algebra
    worst = _Worst()
    eye = np.eye(alg.n)
    for rng in sample_rngs(cfg.seed, cfg.samples):
        f = sampling.random_gauge_map(g, alg, rng)
        omega = gauge.log_deriv_left(f)
        pd = periods.solve_periods(omega)
        worst.update("periods_identity", max(np.abs(c - eye).max() for c in pd.periods))
        prim = periods.recover_primitive(omega)
        worst.update("primitive_alignment", periods.primitive_deviation(prim, f))
    worst.emit(report, cfg, {"periods_identity": 1e-8, "primitive_alignment": 1e-7})


# 7 -----------------------------------------------------------------------

def _commuting_constants(alg, rng):
    """Two commuting elements of ``alg``: ``B`` is a polynomial in ``A`` projected back."""
    a = alg.random_element(rng)
    if alg.is_abelian:
        return a, alg.random_element(rng)
    c1, c2 = rng.standard_normal(2)
    b = c1 * a + c2 * (a @ a - np.trace(a @ a) / alg.n * np.eye(alg.n))
    if not alg.contains(b):
        b = c1 * a
    return a, b


@scenario("flat-periods", ScenarioSpec(default_d=1))
def flat_periods(cfg, report):
    g, alg = cfg.geometry, cfg.algebra
    worst = _Worst()
    obstruction_missed = 0
    for rng in sample_rngs(cfg.seed, cfg.samples):
        a, b = _commuting_constants(alg, rng)
        coeffs = [None] * g.ndim_real
        coeffs[0] = Field.constant(g, a)
        coeffs[1] = Field.constant(g, b)
        omega = forms.real_one_form(g, coeffs)
        pd = periods.solve_periods(omega)
        ea, eb = liealg.expm(a), liealg.expm(b)
        worst.update("period_s", rel(np.abs(pd.periods[0] - ea).max(), np.abs(ea).max()))
        worst.update("period_t", rel(np.abs(pd.periods[1] - eb).max(), np.abs(eb).max()))
        worst.update("period_commutator", pd.max_commutator())
        if not alg.is_abelian:
            x, y = alg.random_element(rng), alg.random_element(rng)
            bad = forms.real_one_form(g, [Field.constant(g, x), Field.constant(g, y)] + [None] * (g.ndim_real - 2))
            try:
                periods.solve_periods(bad)
                obstruction_missed += 1
            except CurvatureObstructionError:
                pass
    worst.emit(report, cfg, {"period_s": 1e-9, "period_t": 1e-9, "period_commutator": 1e-9})
    report.add("missed_curvature_obstructions", obstruction_missed, 1)


# 8 -----------------------------------------------------------------------

@scenario("cocycle-identities", ScenarioSpec(default_d=1, required_d=1))
def cocycle_identities(cfg, report):
    g, alg = cfg.geometry, cfg.algebra
    worst = _Worst()
    c = complex(*cfg.options.get("eta", [1.0, 0.0]))
    eta = extension.EtaForm(g, c)

    def br(u, v):
        return u @ v - v @ u

    for rng in sample_rngs(cfg.seed, cfg.samples):
        f, h, k = (sampling.random_field(g, alg, rng) for _ in range(3))
        worst.update("antisymmetry", abs(extension.cocycle(eta, f, h) + extension.cocycle(eta, h, f)))
        cyc = (
            extension.cocycle(eta, br(f, h), k)
            + extension.cocycle(eta, br(h, k), f)
            + extension.cocycle(eta, br(k, f), h)
        )
        worst.update("cocycle_identity", abs(cyc))
        A, B, C = (extension.ExtensionElement(complex(*rng.standard_normal(2)), x) for x in (f, h, k))

        def eb(u, v):
            return extension.ext_bracket(eta, u, v)

        jac = eb(eb(A, B), C) + eb(eb(B, C), A) + eb(eb(C, A), B)
        worst.update("extension_jacobi", jac.max_norm())
    worst.emit(report, cfg, {"antisymmetry": 1e-10, "cocycle_identity": 1e-9, "extension_jacobi": 1e-9})


# 9 -----------------------------------------------------------------------

@scenario("pairing-invariance", ScenarioSpec(default_d=1, required_d=1))
def pairing_invariance(cfg, report):
    g, alg = cfg.geometry, cfg.algebra
    worst = _Worst()
    c = complex(*cfg.options.get("eta", [1.0, 0.0]))
    eta = extension.EtaForm(g, c)
    for rng in sample_rngs(cfg.seed, cfg.samples):
        lam = complex(*rng.standard_normal(2))
        v = extension.CoadjointVector(lam, sampling.random_form(g, alg, rng, 0, 1))
        a = extension.ExtensionElement(complex(*rng.standard_normal(2)), sampling.random_field(g, alg, rng))
        f = sampling.random_gauge_map(g, alg, rng)
        lhs = extension.pairing(extension.coadjoint_act(v, f), a, eta)
        rhs = extension.pairing(v, extension.group_action_ext(eta, f, a), eta)
        worst.update("pairing_invariance", rel(abs(lhs - rhs), abs(rhs)))
        f2 = sampling.random_gauge_map(g, alg, rng)
        left = extension.group_action_ext(eta, f @ f2, a)
        right = extension.group_action_ext(eta, f, extension.group_action_ext(eta, f2, a))
        worst.update("group_action_law", rel((left - right).max_norm(), left.max_norm()))
        v1 = extension.CoadjointVector(1.0, v.xi)
        diff = extension.coadjoint_act(v1, f).xi - gauge.act_bullet(v.xi, f)
        worst.update("level_one_matches_bullet", diff.max_norm())
    K = int(cfg.options.get("K", min(3, g.N)))
    gram = extension.gram_rank(eta, alg, K)
    worst.emit(
        report, cfg, {"pairing_invariance": 1e-8, "group_action_law": 1e-8, "level_one_matches_bullet": 1e-12}
    )
    report.add("gram_rank_deficit", gram["expected_rank"] - gram["rank"], 1)
    report.add("gram_condition", gram["sigma_max"] / gram["sigma_min"], cfg.tolerances.get("gram_condition", 1e8))
    report.details["gram"] = gram


# 10 ----------------------------------------------------------------------

@scenario("orbit-jacobian", ScenarioSpec(default_d=1, required_d=1, default_algebra="gl1", required_algebra="gl1"))
def orbit_jacobian(cfg, report):
    """Invariance of the abelian class under gauge maps and separation of distinct classes."""
    g, alg = cfg.geometry, cfg.algebra
    basis = gauge.winding_lattice(g)
    max_w = int(cfg.options.get("max_winding", 3))
    drift = 0.0
    coadjoint_drift = 0.0
    false_matches = 0
    table = []
    for rng in sample_rngs(cfg.seed, cfg.samples):
        xi = sampling.random_form(g, alg, rng, 0, 1)
        cls0 = gauge.abelian_bundle_class(xi, basis)
        m, n = (int(v) for v in rng.integers(-max_w, max_w + 1, size=2))
        f = gauge.GaugeMap.winding(g, m, n) @ sampling.random_gauge_map(g, alg, rng)
        cls1 = gauge.abelian_bundle_class(gauge.act_bullet(xi, f), basis)
        drift = max(drift, cls0.distance(cls1))
        v = extension.CoadjointVector(1.0, xi)
        cls2 = gauge.abelian_bundle_class(extension.coadjoint_act(v, f).xi, basis)
        coadjoint_drift = max(coadjoint_drift, cls0.distance(cls2))
        table.append({"winding": [m, n], "coords": list(cls0.coords), "drift": cls0.distance(cls1)})

        # a second form whose class sits half a cell away
        shift = 0.5 * basis[0] + 0.37 * basis[1]
        other = xi + forms.one_form(g, dzbar=[np.array([[shift]])])
        for mm in range(-max_w, max_w + 1):
            for nn in range(-max_w, max_w + 1):
                moved = gauge.act_bullet(other, gauge.GaugeMap.winding(g, mm, nn))
                if gauge.abelian_bundle_class(moved, basis).same_as(cls0):
                    false_matches += 1
    report.add("class_drift", drift, cfg.tol("class_drift", 1e-7))
    report.add("coadjoint_class_drift", coadjoint_drift, cfg.tol("coadjoint_class_drift", 1e-7))
    report.add("distinct_class_matches", false_matches, 1)
    report.details["lattice"] = [[b.real, b.imag] for b in basis]
    report.details["invariance_table"] = table


# 11 ----------------------------------------------------------------------

@scenario("moduli-canonicalization", ScenarioSpec(default_d=1, default_samples=50))
def moduli_canonicalization(cfg, report):
    sizes = cfg.options.get("n", [2, 3])
    conj_fail = perm_fail = idem_fail = separation_fail = 0
    rngs = sample_rngs(cfg.seed, cfg.samples)
    for n in sizes:
        for i, rng in enumerate(rngs):
            p = moduli.random_commuting_pair(n, rng, degenerate=(i % 5 == 4))
            u = moduli.random_special_unitary(n, rng)
            if not moduli.orbits_equal(p, p.conjugate(u)):
                conj_fail += 1
            t, basis_u = moduli.torus_reduce(p)
            canon = moduli.weyl_canonicalize(t)
            again = moduli.weyl_canonicalize(canon.rep)
            if not (np.array_equal(again.rep.theta, canon.rep.theta) and np.array_equal(again.rep.phi, canon.rep.phi)):
                idem_fail += 1
            if i < 10:
                for perm in permutations(range(n)):
                    c2 = moduli.weyl_canonicalize(t.permuted(perm))
                    if not (np.array_equal(c2.rep.theta, canon.rep.theta) and np.array_equal(c2.rep.phi, canon.rep.phi)):
                        perm_fail += 1
            # multiplying x by a different element of the same torus changes the orbit
            psi = moduli.random_torus_phases(n, rng)
            x2 = basis_u @ np.diag(psi) @ basis_u.conj().T @ p.x
            if min(np.abs(psi - 1)) > 1e-3 and moduli.orbits_equal(p, moduli.CommutingPair(x2, p.y)):
                separation_fail += 1
    report.add("conjugation_failures", conj_fail, 1)
    report.add("weyl_invariance_failures", perm_fail, 1)
    report.add("idempotence_failures", idem_fail, 1)
    report.add("separation_failures", separation_fail, 1)
    report.details["sizes"] = list(sizes)


# runner ------------------------------------------------------------------

def run_scenario(cfg):
    """Run the configured scenario; runtime errors are captured in the report."""
    report = Report(scenario=cfg.scenario, seed=cfg.seed, config=cfg.echo())
    start = time.perf_counter()
    try:
        REGISTRY[cfg.scenario](cfg, report)
    except (HolobundleError, ArithmeticError, ValueError, np.linalg.LinAlgError) as exc:
        report.error = {"type": type(exc).__name__, "message": str(exc)}
    if cfg.timing:
        report.wall_clock = time.perf_counter() - start
    return report
