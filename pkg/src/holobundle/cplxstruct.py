"""The almost complex structure ``I_omega`` on ``M x G`` and its torsion.

Right-invariant vector fields on the trivial bundle are pairs ``(X, h)``: a
vector field ``X`` on the torus and a matrix-valued field ``h``.  Their bracket
is the semidirect one,

    [(X, f), (Y, g)] = (-[X, Y], Y(f) - X(g) + [f, g]),

and ``I_omega`` acts by ``(X, h) -> (J X, i h + 2i omega(X))`` where ``J`` is the
complex structure of the torus.  The torsion is computed verbatim from

    N(A, B) = [IA, IB] - [A, B] - I[IA, B] - I[A, IB].

Vector-field components are stored against ``(d/ds_1, d/dt_1, ...)`` as scalar
fields; complex coefficients are allowed.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from . import forms, torus
from .errors import BidegreeError, GeometryMismatchError
from .torus import Field


def _scalar_field(geometry, c):
    if isinstance(c, Field):
        if not c.is_scalar:
            raise ValueError("vector-field components must be scalar fields")
        return c
    return Field.scalar(geometry, c)


@dataclass(frozen=True, eq=False)
class InvariantField:
    """Pair ``(X, h)``: base vector field ``X`` and fiber field ``h``."""

    geometry: torus.TorusGeometry
    X: tuple
    h: Field

    def __post_init__(self):
        g = self.geometry
        if len(self.X) != g.ndim_real:
            raise GeometryMismatchError(f"base part needs {g.ndim_real} components")
        comps = tuple(_scalar_field(g, c) for c in self.X)
        for c in comps + (self.h,):
            if c.geometry != g:
                raise GeometryMismatchError("invariant field parts on different tori")
        object.__setattr__(self, "X", comps)

    @classmethod
    def base(cls, geometry, components, n):
        return cls(geometry, tuple(components), Field.zeros(geometry, (n, n)))

    @classmethod
    def fiber(cls, h):
        g = h.geometry
        return cls(g, (0.0,) * g.ndim_real, h)

    @classmethod
    def frame(cls, geometry, axis, n):
        """Constant real frame field ``(d/dx_axis, 0)``."""
        comps = [0.0] * geometry.ndim_real
        comps[axis] = 1.0
        return cls.base(geometry, comps, n)

    def __add__(self, other):
        return InvariantField(
            self.geometry, tuple(a + b for a, b in zip(self.X, other.X)), self.h + other.h
        )

    def __neg__(self):
        return InvariantField(self.geometry, tuple(-a for a in self.X), -self.h)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, c):
        return InvariantField(self.geometry, tuple(a * c for a in self.X), self.h * c)

    __rmul__ = __mul__

    def base_norm(self):
        return max(c.max_norm() for c in self.X)

    def fiber_norm(self):
        return self.h.max_norm()

    def max_norm(self):
        return max(self.base_norm(), self.fiber_norm())


def apply_vector(X, f):
    """Directional derivative ``X(f) = sum_a X^a d f / d x_a`` (spectral)."""
    total = None
    for a, c in enumerate(X):
        if c.max_norm() == 0.0:
            continue
        term = torus.deriv_real(f, a) * c
        total = term if total is None else total + term
    return total if total is not None else Field.zeros(f.geometry, f.matrix_shape)


def lie_bracket(X, Y):
    """``[X, Y]^a = X(Y^a) - Y(X^a)``."""
    return tuple(apply_vector(X, ya) - apply_vector(Y, xa) for xa, ya in zip(X, Y))


def semidirect_bracket(A, B):
    """``[(X, f), (Y, g)] = (-[X, Y], Y(f) - X(g) + [f, g])``."""
    if A.geometry != B.geometry:
        raise GeometryMismatchError("invariant fields on different tori")
    base = tuple(-c for c in lie_bracket(A.X, B.X))
    fib = apply_vector(B.X, A.h) - apply_vector(A.X, B.h) + (A.h @ B.h - B.h @ A.h)
    return InvariantField(A.geometry, base, fib)


def apply_J(geometry, X):
    """Base complex structure on real-frame components."""
    j = geometry.complex_structure()
    n = geometry.ndim_real
    return tuple(
        sum((X[b] * j[a, b] for b in range(n) if j[a, b] != 0), Field.scalar(geometry, 0.0))
        for a in range(n)
    )


@dataclass(frozen=True, eq=False)
class ComplexStructure:
    """``I_omega`` for a matrix-valued ``(0, 1)``-form ``omega``."""

    omega: forms.Form

    def __post_init__(self):
        if not self.omega.is_type(0, 1):
            raise BidegreeError("I_omega needs a form of type (0,1)")

    @property
    def geometry(self):
        return self.omega.geometry

    @property
    def n(self):
        return self.omega.matrix_shape[0]

    def omega_of(self, X):
        return self.omega.evaluate(X)


def apply_I(S, A):
    """``I_omega(X, h) = (J X, i h + 2i omega(X))``."""
    if A.geometry != S.geometry:
        raise GeometryMismatchError("invariant field and structure on different tori")
    return InvariantField(A.geometry, apply_J(A.geometry, A.X), A.h * 1j + S.omega_of(A.X) * 2j)


def torsion(S, A, B):
    """``N(A, B) = [IA, IB] - [A, B] - I[IA, B] - I[A, IB]``."""
    ia, ib = apply_I(S, A), apply_I(S, B)
    return (
        semidirect_bracket(ia, ib)
        - semidirect_bracket(A, B)
        - apply_I(S, semidirect_bracket(ia, B))
        - apply_I(S, semidirect_bracket(A, ib))
    )


def fbar_on_frame(omega, a, b):
    """``Fbar(omega)(d/dx_a, d/dx_b)`` as a field."""
    eye = np.eye(omega.geometry.ndim_real)
    return forms.curvature_Fbar(omega).evaluate(eye[a], eye[b])


def torsion_fbar_residual(S, a, b):
    """``|| N_fiber((e_a, 0), (e_b, 0)) + 4 Fbar(omega)(e_a, e_b) ||`` on constant frames."""
    g, n = S.geometry, S.n
    nt = torsion(S, InvariantField.frame(g, a, n), InvariantField.frame(g, b, n))
    return (nt.h + fbar_on_frame(S.omega, a, b) * 4).max_norm()


def _random_matrix_field(geometry, n, rng, degree=1):
    coeffs = np.zeros(geometry.grid_shape + (n, n), dtype=complex)
    for idx in np.ndindex(*(2 * degree + 1,) * geometry.ndim_real):
        k = np.array(idx) - degree
        w = 1.0 / (1.0 + float(k @ k))
        coeffs[tuple(k % geometry.M)] = w * (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / 2
    return torus.from_modes(torus.ModeArray(geometry, coeffs))


def _random_real_vector(geometry, rng):
    """Real vector field with degree-one trigonometric components."""
    return tuple(
        Field.scalar(geometry, _random_matrix_field(geometry, 1, rng).values[..., 0, 0].real)
        for _ in range(geometry.ndim_real)
    )


def integrability_check(S, tol=1e-7, rng=None, n_mixed=2, omega_spec=None):
    """Torsion-based integrability report for ``I_omega``.

    Samples the torsion on every pair of constant real frame fields, and on
    ``n_mixed`` random pairs of the mixed classes ``((X,0),(0,f))`` and
    ``((0,f),(0,g))``.  The verdict is ``"integrable"`` when both the torsion
    and ``Fbar(omega)`` are below ``tol``; ``criteria_agree`` records whether the
    two tests give the same answer.
    """
    g, n = S.geometry, S.n
    rng = np.random.default_rng(0) if rng is None else rng
    frame = [InvariantField.frame(g, a, n) for a in range(g.ndim_real)]
    real_max = max(
        (torsion(S, frame[a], frame[b]).max_norm() for a, b in combinations(range(g.ndim_real), 2)),
        default=0.0,
    )
    mixed_max = 0.0
    for _ in range(n_mixed):
        x = InvariantField.base(g, rng.standard_normal(g.ndim_real), n)
        f = InvariantField.fiber(_random_matrix_field(g, n, rng))
        f2 = InvariantField.fiber(_random_matrix_field(g, n, rng))
        mixed_max = max(mixed_max, torsion(S, x, f).max_norm(), torsion(S, f, f2).max_norm())
    fbar = forms.curvature_Fbar(S.omega).max_norm()
    torsion_max = max(real_max, mixed_max)
    torsion_ok = torsion_max < tol
    fbar_ok = fbar < tol
    if omega_spec is None:
        omega_spec = {"geometry": g.to_dict(), "matrix_shape": list(S.omega.matrix_shape)}
    return {
        "omega_spec": omega_spec,
        "torsion_max": float(torsion_max),
        "torsion_frame_max": float(real_max),
        "torsion_mixed_max": float(mixed_max),
        "Fbar_max": float(fbar),
        "verdict": "integrable" if (torsion_ok and fbar_ok) else "non-integrable",
        "criteria_agree": bool(torsion_ok == fbar_ok),
        "tol": tol,
    }


# Open-question probes ---------------------------------------------------

def holomorphic_vector(geometry, k, coeff):
    """Real-frame components of ``coeff * d/dz_k`` (a type-(1,0) field)."""
    tau = geometry.tau[k]
    den = tau - np.conj(tau)
    comps = [Field.scalar(geometry, 0.0)] * geometry.ndim_real
    coeff = _scalar_field(geometry, coeff)
    comps[2 * k] = coeff * (-np.conj(tau) / den)
    comps[2 * k + 1] = coeff * (1.0 / den)
    return tuple(comps)


def consequence_residual(omega, X, Y):
    """``|| delbar(omega)(X, Y) + omega([X, Y]) ||`` for vector fields ``X``, ``Y``."""
    g = omega.geometry
    X = tuple(_scalar_field(g, c) for c in X)
    Y = tuple(_scalar_field(g, c) for c in Y)
    lhs = forms.delbar(omega).evaluate(X, Y)
    rhs = omega.evaluate(lie_bracket(X, Y))
    return (lhs + rhs).max_norm()


def consequence_report(omega, rng, samples=3):
    """Residual of ``delbar w(X, Y) = -w([X, Y])`` for several classes of vector fields.

    Classes: constant real frames, non-constant real fields, and type-(1,0)
    fields with non-constant coefficients.  The identity is reported, not
    asserted; the torsion code does not use it.
    """
    g = omega.geometry
    out = {"real_constant": 0.0, "real_varying": 0.0, "type_10": 0.0}
    eye = np.eye(g.ndim_real)
    for a, b in combinations(range(g.ndim_real), 2):
        out["real_constant"] = max(out["real_constant"], consequence_residual(omega, eye[a], eye[b]))
    for _ in range(samples):
        X = _random_real_vector(g, rng)
        Y = _random_real_vector(g, rng)
        out["real_varying"] = max(out["real_varying"], consequence_residual(omega, X, Y))
        k1, k2 = rng.integers(g.d), rng.integers(g.d)
        Z1 = holomorphic_vector(g, k1, _random_matrix_field(g, 1, rng).values[..., 0, 0])
        Z2 = holomorphic_vector(g, k2, _random_matrix_field(g, 1, rng).values[..., 0, 0])
        out["type_10"] = max(out["type_10"], consequence_residual(omega, Z1, Z2))
    return out


def torsion_general_report(S, rng, samples=3):
    """``max || N_fiber((X,0),(Y,0)) + 4 Fbar(X, Y) ||`` over non-constant real fields.

    Tensoriality predicts zero; reported alongside the constant-frame check.
    """
    g, n = S.geometry, S.n
    fbar = forms.curvature_Fbar(S.omega)
    worst = 0.0
    for _ in range(samples):
        X = _random_real_vector(g, rng)
        Y = _random_real_vector(g, rng)
        nt = torsion(S, InvariantField.base(g, X, n), InvariantField.base(g, Y, n))
        worst = max(worst, (nt.h + fbar.evaluate(X, Y) * 4).max_norm(), nt.base_norm())
    return worst
