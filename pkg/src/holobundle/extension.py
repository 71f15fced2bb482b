"""Central extension of the current algebra on a 1-dimensional torus.

For a holomorphic 1-form ``eta = c dz`` the cocycle

    Omega(f, g) = int eta ^ <f, dg>

twists the pointwise bracket of ``g``-valued fields into a central extension
``E = C + C^inf(T, g)``.  Its smooth dual is modelled as pairs ``(lam, xi)`` of a
level and a ``(0, 1)``-form, paired with ``(x, X)`` by
``lam x - int eta ^ <xi, X>``.  The current group acts on both sides and the
pairing is invariant.

The invariant form is the trace form, so every number computed here scales
with that choice (and linearly with ``c``).
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np

from . import forms, gauge, torus
from .errors import BidegreeError, GeometryMismatchError
from .forms import Form
from .torus import Field


def _need_curve(geometry):
    if geometry.d != 1:
        raise GeometryMismatchError("the central extension is implemented for d = 1 only")


@dataclass(frozen=True)
class EtaForm:
    """``eta = c dz`` on a 1-dimensional torus (holomorphic, so ``delbar eta = 0``)."""

    geometry: torus.TorusGeometry
    c: complex = 1.0

    def __post_init__(self):
        _need_curve(self.geometry)
        object.__setattr__(self, "c", complex(self.c))

    def form(self):
        return forms.one_form(self.geometry, dz=[np.array([[self.c]])])

    def scaled(self, factor):
        return EtaForm(self.geometry, self.c * factor)


def _integral_with_eta(eta, alpha):
    """``int eta ^ alpha`` for a scalar 1-form ``alpha``."""
    return forms.integrate_top(forms.wedge(eta.form(), alpha, product="scalar"))


def cocycle(eta, f, g):
    """``Omega(f, g) = int eta ^ <f, dg>``."""
    _need_curve(f.geometry)
    if f.geometry != eta.geometry or g.geometry != eta.geometry:
        raise GeometryMismatchError("cocycle arguments on different tori")
    dg = forms.ext_d(Form.function(g))
    return complex(_integral_with_eta(eta, forms.pair(f, dg)))


@dataclass(frozen=True, eq=False)
class ExtensionElement:
    """``(x, X)``: central part ``x`` and current part ``X``."""

    x: complex
    X: Field

    def __post_init__(self):
        _need_curve(self.X.geometry)
        object.__setattr__(self, "x", complex(self.x))

    def __add__(self, other):
        return ExtensionElement(self.x + other.x, self.X + other.X)

    def __sub__(self, other):
        return ExtensionElement(self.x - other.x, self.X - other.X)

    def __mul__(self, c):
        return ExtensionElement(self.x * c, self.X * c)

    __rmul__ = __mul__

    def max_norm(self):
        return max(abs(self.x), self.X.max_norm())


@dataclass(frozen=True, eq=False)
class CoadjointVector:
    """``(lam, xi)`` with ``xi`` of type ``(0, 1)``.

    ``real_level=True`` restricts the level to real numbers.
    """

    lam: complex
    xi: Form
    real_level: bool = False

    def __post_init__(self):
        _need_curve(self.xi.geometry)
        if not self.xi.is_type(0, 1):
            raise BidegreeError("coadjoint vectors need a form of type (0,1)")
        lam = complex(self.lam)
        if self.real_level and lam.imag != 0:
            raise ValueError("level must be real when real_level is set")
        object.__setattr__(self, "lam", lam)

    def max_norm(self):
        return max(abs(self.lam), self.xi.max_norm())


def ext_bracket(eta, a, b):
    """``[(x, X), (y, Y)] = (Omega(X, Y), [X, Y])``."""
    return ExtensionElement(cocycle(eta, a.X, b.X), a.X @ b.X - b.X @ a.X)


def group_action_ext(eta, f, a):
    """``f.(x, X) = (x - int eta ^ <f^-1 delbar f, X>, Ad(f) X)``; a left action."""
    if f.geometry != a.X.geometry:
        raise GeometryMismatchError("gauge map and element on different tori")
    shift = _integral_with_eta(eta, forms.pair(a.X, gauge.log_deriv_delbar(f)))
    fv = f.values
    return ExtensionElement(a.x - shift, Field(f.geometry, fv @ a.X.values @ np.linalg.inv(fv)))


def coadjoint_act(v, f):
    """``(lam, xi) * f = (lam, lam f^-1 delbar f + Ad(f)^-1 xi)``; a right action."""
    xi = gauge.ad_inverse_form(f, v.xi)
    if v.lam != 0:
        xi = xi + gauge.log_deriv_delbar(f) * v.lam
    return CoadjointVector(v.lam, xi, v.real_level)


def pairing(v, a, eta):
    """``((lam, xi), (x, X)) = lam x - int eta ^ <xi, X>``."""
    if v.xi.geometry != a.X.geometry:
        raise GeometryMismatchError("pairing arguments on different tori")
    return complex(v.lam * a.x - _integral_with_eta(eta, forms.pair(a.X, v.xi)))


def gram_matrix(eta, algebra, K):
    """Gram matrix of the pairing between ``(0, e_a e_k dzbar)`` and ``(0, e_b e_l)``.

    Rows and columns run over frequencies ``max|k_i| <= K`` times the algebra
    basis.  The ``dzbar`` direction is handled once: ``psi`` is the top
    coefficient of ``eta ^ dzbar``, so each entry is ``-mean(psi tr(xi X))``.
    """
    g = eta.geometry
    if K > g.N:
        raise ValueError(f"cutoff K={K} exceeds the band limit {g.N}")
    dzbar = forms.one_form(g, dzbar=[np.ones((1, 1))])
    wedge = forms.wedge(eta.form(), dzbar, product="scalar")
    psi = wedge.evaluate(*np.eye(g.ndim_real)).values[..., 0, 0]
    freqs = list(product(range(-K, K + 1), repeat=g.ndim_real))
    x = g.coordinates()
    waves = np.stack([np.exp(torus.TWO_PI_I * sum(k * xa for k, xa in zip(f, x))) for f in freqs])
    basis = algebra.basis
    # tr(e_a e_b) times mean(psi w_k w_l)
    tr = np.einsum("aij,bji->ab", basis, basis)
    axes = tuple(range(1, g.ndim_real + 1))
    wave_gram = np.tensordot(waves * psi, waves, axes=(axes, axes)) / g.M ** g.ndim_real
    return -np.kron(wave_gram, tr)


def gram_rank(eta, algebra, K, rel_tol=1e-8):
    """Rank report of :func:`gram_matrix` (singular values relative to the largest)."""
    gram = gram_matrix(eta, algebra, K)
    sv = np.linalg.svd(gram, compute_uv=False)
    rank = int(np.sum(sv > rel_tol * sv[0])) if sv.size else 0
    return {
        "K": K,
        "size": int(gram.shape[0]),
        "rank": rank,
        "expected_rank": algebra.dim * (2 * K + 1) ** eta.geometry.ndim_real,
        "sigma_max": float(sv[0]),
        "sigma_min": float(sv[-1]),
        "full_rank": bool(rank == gram.shape[0]),
    }
