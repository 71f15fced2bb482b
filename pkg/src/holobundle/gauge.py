"""Gauge maps, logarithmic derivatives and the two gauge actions.

``omega * f = delta(f) + Ad(f)^{-1} omega`` acts on all matrix-valued
1-forms; ``omega . f = f^{-1} delbar f + Ad(f)^{-1} omega`` acts on forms of
type (0, 1).  Both are right actions of the current group ``C^inf(M, G)``.

Logarithmic derivatives of a gauge map are computed spectrally from its grid
values, which is exact when the entries of ``f`` are trigonometric
polynomials inside the band.  Maps built from a generator (``f = exp(h)``)
instead use the exact derivative of the exponential applied to the spectral
derivative of ``h``, so they are usable even though ``exp(h)`` is not
band-limited.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import forms, liealg, torus
from .errors import AbelianOnlyError, BidegreeError, GeometryMismatchError
from .forms import Form
from .torus import Field, TorusGeometry


@dataclass(frozen=True, eq=False)
class GaugeMap:
    """A smooth map from the torus into a matrix group, sampled on the grid.

    ``generator`` (optional) is a field ``h`` with
    ``values == expm(h) * exp(2 pi i k.x)``, where ``k = windings`` (zeros when
    omitted); when present, logarithmic derivatives are computed from it.
    """

    geometry: TorusGeometry
    values: np.ndarray
    generator: Field | None = field(default=None, repr=False)
    windings: tuple | None = field(default=None, repr=False)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex)
        g = self.geometry
        if v.shape[: g.ndim_real] != g.grid_shape or v.ndim != g.ndim_real + 2:
            raise GeometryMismatchError(f"gauge values of shape {v.shape} do not match the grid")
        liealg.check_invertible(v)
        object.__setattr__(self, "values", v)

    @property
    def n(self):
        return self.values.shape[-1]

    # constructors -------------------------------------------------------
    @classmethod
    def identity(cls, geometry, n):
        return cls.constant(geometry, np.eye(n))

    @classmethod
    def constant(cls, geometry, g0):
        g0 = np.atleast_2d(np.asarray(g0, dtype=complex))
        return cls(geometry, np.broadcast_to(g0, geometry.grid_shape + g0.shape).copy())

    @classmethod
    def from_generator(cls, h):
        """``f = exp(h)`` pointwise for a matrix-valued field ``h``."""
        return cls(h.geometry, liealg.expm(h.values), generator=h)

    @classmethod
    def from_field(cls, f):
        return cls(f.geometry, f.values)

    @classmethod
    def winding(cls, geometry, m, n=0, *more, size=1):
        """``exp(2 pi i (m s_1 + n t_1 + ...)) * I``: the winding maps of the torus.

        Extra integers give windings along ``s_2, t_2`` on ``d = 2``.
        """
        ks = (m, n) + more
        ks = ks + (0,) * (geometry.ndim_real - len(ks))
        if len(ks) != geometry.ndim_real:
            raise ValueError("too many winding numbers for this torus")
        phase = Field.single_mode(geometry, ks)
        gen = Field.constant(geometry, np.zeros((size, size)))
        return cls(geometry, phase.values * np.eye(size), gen, tuple(int(k) for k in ks))

    # group structure ----------------------------------------------------
    def as_field(self):
        return Field(self.geometry, self.values)

    def inverse(self):
        gen = -self.generator if self.generator is not None else None
        wind = tuple(-k for k in self.windings) if self.windings is not None else None
        return GaugeMap(self.geometry, np.linalg.inv(self.values), gen, wind)

    def __matmul__(self, other):
        """Pointwise product ``(fg)(x) = f(x) g(x)``.

        Generators are carried only for ``1 x 1`` maps, where ``exp(h1) exp(h2) = exp(h1 + h2)``.
        """
        if not isinstance(other, GaugeMap):
            return NotImplemented
        if other.geometry != self.geometry:
            raise GeometryMismatchError("gauge maps on different tori")
        gen = wind = None
        if self.n == 1 and self.generator is not None and other.generator is not None:
            gen = self.generator + other.generator
            wind = tuple(a + b for a, b in zip(self._winding(), other._winding()))
        return GaugeMap(self.geometry, self.values @ other.values, gen, wind)

    def _winding(self):
        return self.windings if self.windings is not None else (0,) * self.geometry.ndim_real

    def max_deviation(self, other):
        return float(np.abs(self.values - other.values).max())


def _real_frame_derivs(f):
    """``[d f / d x_a]`` for every real axis, as value arrays."""
    g = f.geometry
    if f.generator is not None:
        h = f.generator
        eye = np.eye(f.n)
        return None, [
            liealg.dexp_left(h.values, torus.deriv_real(h, a).values) + 2j * np.pi * k * eye
            for a, k in enumerate(f._winding())
        ]
    ff = f.as_field()
    return [torus.deriv_real(ff, a).values for a in range(g.ndim_real)], None


def log_deriv_left(f):
    """``delta(f) = f^{-1} df`` as a 1-form."""
    g = f.geometry
    raw, left = _real_frame_derivs(f)
    if left is None:
        finv = np.linalg.inv(f.values)
        left = [finv @ dv for dv in raw]
    return forms.real_one_form(g, [Field(g, v) for v in left])


def log_deriv_right(f):
    """``delta^r(f) = df f^{-1}`` as a 1-form."""
    g = f.geometry
    raw, left = _real_frame_derivs(f)
    if raw is None:
        raw = [f.values @ v for v in left]
    finv = np.linalg.inv(f.values)
    return forms.real_one_form(g, [Field(g, dv @ finv) for dv in raw])


def log_deriv_delbar(f):
    """``f^{-1} delbar f``, the (0, 1) part of ``delta(f)``."""
    return log_deriv_left(f).part(0, 1)


def log_deriv_partial(f):
    """``f^{-1} partial f``, the (1, 0) part of ``delta(f)``."""
    return log_deriv_left(f).part(1, 0)


def ad_inverse_form(f, omega):
    """``Ad(f)^{-1} omega = f^{-1} omega f`` coefficientwise."""
    if omega.geometry != f.geometry:
        raise GeometryMismatchError("form and gauge map on different tori")
    if omega.matrix_shape != (f.n, f.n):
        raise GeometryMismatchError("form values and gauge map have different matrix sizes")
    finv = np.linalg.inv(f.values)
    return omega.map(lambda c: Field(c.geometry, finv @ c.values @ f.values))


def ad_form(f, omega):
    """``Ad(f) omega = f omega f^{-1}`` coefficientwise."""
    finv = np.linalg.inv(f.values)
    return omega.map(lambda c: Field(c.geometry, f.values @ c.values @ finv))


def act_star(omega, f):
    """``omega * f = delta(f) + Ad(f)^{-1} omega``."""
    if omega.degree != 1:
        raise BidegreeError("act_star needs a 1-form")
    return log_deriv_left(f) + ad_inverse_form(f, omega)


def act_bullet(omega, f):
    """``omega . f = f^{-1} delbar f + Ad(f)^{-1} omega`` on (0, 1)-forms."""
    if not omega.is_type(0, 1):
        raise BidegreeError("act_bullet needs a form of type (0,1)")
    return log_deriv_delbar(f) + ad_inverse_form(f, omega)


def equivalence_residual(omega1, omega2, f):
    """``|| omega1 - omega2 . f ||``: certifies ``omega1 = omega2 . f`` for a given ``f``.

    Deciding whether *some* ``f`` exists is not attempted for non-abelian groups.
    """
    return (omega1 - act_bullet(omega2, f)).max_norm()


# Abelian classifier ----------------------------------------------------

@dataclass(frozen=True)
class JacobianClass:
    """Point of ``C / L`` where ``L`` is the lattice of winding shifts.

    ``mean`` is the raw zero mode of the ``dzbar`` coefficient, ``coords`` its
    coordinates ``(a, b)`` in ``[0, 1)^2`` with respect to ``basis``, and
    ``point`` the reduced representative ``a basis[0] + b basis[1]``.
    """

    mean: complex
    point: complex
    coords: tuple
    basis: tuple

    def distance(self, other):
        """Distance between classes in ``C / L`` (minimum over lattice translates)."""
        diff = _lattice_coords(self.basis, self.mean - other.mean)
        best = np.inf
        for da in (-1, 0, 1):
            for db in (-1, 0, 1):
                a = diff[0] - np.round(diff[0]) + da
                b = diff[1] - np.round(diff[1]) + db
                best = min(best, abs(a * self.basis[0] + b * self.basis[1]))
        return float(best)

    def same_as(self, other, tol=1e-7):
        return self.distance(other) < tol

    def to_dict(self):
        return {
            "mean": [self.mean.real, self.mean.imag],
            "point": [self.point.real, self.point.imag],
            "coords": list(self.coords),
            "lattice": [[b.real, b.imag] for b in self.basis],
        }


def _lattice_coords(basis, z):
    mat = np.array([[basis[0].real, basis[1].real], [basis[0].imag, basis[1].imag]])
    return np.linalg.solve(mat, np.array([z.real, z.imag]))


def _mean_dzbar(xi):
    return complex(torus.integrate(xi.coefficient("dzbar1")))


def winding_lattice(geometry):
    """Lattice basis measured by acting with the winding maps ``(1, 0)`` and ``(0, 1)``.

    Each basis vector is the shift of the ``dzbar`` zero mode produced by
    ``xi -> xi . f_{m,n}``.
    """
    if geometry.d != 1:
        raise ValueError("winding lattice is defined here for d = 1")
    zero = forms.one_form(geometry, dzbar=[np.zeros((1, 1))])
    return tuple(
        _mean_dzbar(act_bullet(zero, GaugeMap.winding(geometry, m, n))) for m, n in ((1, 0), (0, 1))
    )


def abelian_bundle_class(xi, basis=None):
    """Class of a ``gl(1)``-valued (0, 1)-form on a 1-dimensional torus.

    For abelian ``G`` the action is ``xi -> xi + f^{-1} delbar f``; the zero mode
    of the ``dzbar`` coefficient is invariant under null-homotopic maps and
    shifts by a lattice vector under winding maps, so its class modulo that
    lattice labels the orbit.
    """
    g = xi.geometry
    if xi.matrix_shape != (1, 1):
        raise AbelianOnlyError("abelian only: abelian_bundle_class needs gl(1)-valued forms")
    if g.d != 1:
        raise ValueError("abelian_bundle_class needs d = 1")
    if not xi.is_type(0, 1):
        raise BidegreeError("abelian_bundle_class needs a form of type (0,1)")
    basis = tuple(basis) if basis is not None else winding_lattice(g)
    mean = _mean_dzbar(xi)
    a, b = _lattice_coords(basis, mean)
    a, b = a - np.floor(a), b - np.floor(b)
    # fold values that round up to 1.0 back to the cell origin
    a = 0.0 if a >= 1.0 - 1e-13 else float(a)
    b = 0.0 if b >= 1.0 - 1e-13 else float(b)
    return JacobianClass(mean, complex(a * basis[0] + b * basis[1]), (a, b), basis)


# JSON ------------------------------------------------------------------

def gauge_map_from_json(geometry, obj, size=1):
    """Gauge map from a generator spec.

    ``{"type": "exp", "modes": [...]}`` is ``expm`` of the field with those
    modes (format of :func:`holobundle.forms.field_to_modes_json`);
    ``{"type": "winding", "m": 1, "n": 0}`` is a winding map times the
    ``size x size`` identity; ``{"type": "product", "factors": [...]}`` is the
    pointwise product in the listed order.
    """
    kind = obj.get("type")
    if kind == "exp":
        h = forms.field_from_modes_json(geometry, obj["modes"], (size, size))
        return GaugeMap.from_generator(h)
    if kind == "winding":
        ks = [int(obj.get("m", 0)), int(obj.get("n", 0))] + [int(k) for k in obj.get("more", [])]
        return GaugeMap.winding(geometry, *ks, size=size)
    if kind == "product":
        factors = [gauge_map_from_json(geometry, f, size) for f in obj["factors"]]
        if not factors:
            raise ValueError("product gauge map needs at least one factor")
        out = factors[0]
        for f in factors[1:]:
            out = out @ f
        return out
    raise ValueError(f"unknown gauge map type {kind!r}; expected exp, winding or product")
