"""Flat complex tori and pseudospectral matrix-valued fields.

A torus of complex dimension ``d`` is the product of ``d`` elliptic curves
``C / (Z + tau_k Z)``.  Each factor is parametrised by real coordinates
``(s_k, t_k)`` in ``[0, 1)^2`` with ``z_k = s_k + tau_k t_k``; real axis ``2k`` is
``s_k`` and real axis ``2k + 1`` is ``t_k``.  Each real direction carries an
equispaced grid of ``M = 2N + 1`` points, so that frequencies ``-N..N`` are
represented without a Nyquist mode.

Pointwise products of fields are exact on the grid; spectral derivatives are
exact only for trigonometric polynomials of degree ``<= N`` per axis.  Products
that exceed the band alias, so identity checks feed in low-degree inputs.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import GeometryMismatchError

TWO_PI_I = 2j * np.pi


@dataclass(frozen=True)
class TorusGeometry:
    """Product torus ``prod_k C / (Z + tau_k Z)`` with an odd spectral grid."""

    d: int
    tau: tuple
    N: int

    def __post_init__(self):
        if self.d not in (1, 2):
            raise ValueError("complex dimension d must be 1 or 2")
        tau = tuple(complex(t) for t in np.atleast_1d(self.tau))
        if len(tau) != self.d:
            raise ValueError(f"need {self.d} moduli tau, got {len(tau)}")
        if any(t.imag <= 0 for t in tau):
            raise ValueError("Im(tau) must be positive")
        if int(self.N) != self.N or self.N < 2:
            raise ValueError("N must be an integer >= 2 (grid size 2N+1 >= 5)")
        object.__setattr__(self, "tau", tau)
        object.__setattr__(self, "N", int(self.N))

    @property
    def M(self):
        """Grid points per real direction."""
        return 2 * self.N + 1

    @property
    def ndim_real(self):
        return 2 * self.d

    @property
    def grid_shape(self):
        return (self.M,) * self.ndim_real

    @property
    def grid_axes(self):
        return tuple(range(self.ndim_real))

    @cached_property
    def frequencies(self):
        """Integer frequencies in FFT order, ``[0, 1, .., N, -N, .., -1]``."""
        return np.fft.fftfreq(self.M, 1.0 / self.M).round().astype(int)

    def coordinates(self):
        """Tuple of ``2d`` broadcastable arrays ``(s_1, t_1, s_2, t_2)`` on the grid."""
        x = np.arange(self.M) / self.M
        out = []
        for a in range(self.ndim_real):
            shape = [1] * self.ndim_real
            shape[a] = self.M
            out.append(x.reshape(shape))
        return tuple(out)

    def wavenumbers(self, axis):
        """``2 pi i k`` along ``axis``, shaped to broadcast over the grid."""
        shape = [1] * self.ndim_real
        shape[axis] = self.M
        return (TWO_PI_I * self.frequencies).reshape(shape)

    def dz_of(self, k):
        """``(dz_k(d/ds_k), dz_k(d/dt_k)) = (1, tau_k)``."""
        return (1.0 + 0j, self.tau[k])

    def dzbar_of(self, k):
        return (1.0 + 0j, np.conj(self.tau[k]))

    def real_frame_matrix(self):
        """Matrix ``P`` with ``P[label, a] = theta_label(d/dx_a)``.

        Labels ``0..d-1`` are ``dz_k``, labels ``d..2d-1`` are ``dzbar_k``; real
        axes ``a`` follow the ``(s_1, t_1, s_2, t_2)`` order.
        """
        p = np.zeros((self.ndim_real, self.ndim_real), dtype=complex)
        for k, tau in enumerate(self.tau):
            p[k, 2 * k] = 1.0
            p[k, 2 * k + 1] = tau
            p[self.d + k, 2 * k] = 1.0
            p[self.d + k, 2 * k + 1] = np.conj(tau)
        return p

    def complex_structure(self):
        """Real ``2d x 2d`` matrix of ``J`` acting on ``(d/ds_k, d/dt_k)`` components.

        ``J`` multiplies type-(1,0) vectors by ``i``; for ``tau = i`` it sends
        ``d/ds`` to ``d/dt`` and ``d/dt`` to ``-d/ds``.
        """
        j = np.zeros((self.ndim_real, self.ndim_real))
        for k, tau in enumerate(self.tau):
            a, b = tau.real, tau.imag
            # columns are images of d/ds_k and d/dt_k
            j[2 * k : 2 * k + 2, 2 * k] = (-a / b, 1.0 / b)
            j[2 * k : 2 * k + 2, 2 * k + 1] = (-(a * a + b * b) / b, a / b)
        return j

    def to_dict(self):
        """JSON form; ``"N"`` is the number of grid points per direction (``2N + 1``)."""
        return {
            "d": self.d,
            "tau": [[t.real, t.imag] for t in self.tau],
            "N": self.M,
        }

    @classmethod
    def from_dict(cls, obj):
        """Inverse of :meth:`to_dict`; the grid size must be odd."""
        grid = int(obj["N"])
        if grid % 2 == 0 or grid < 5:
            raise ValueError(f"grid size must be odd and at least 5, got {grid}")
        tau = tuple(complex(*t) if isinstance(t, (list, tuple)) else complex(t) for t in obj["tau"])
        return cls(int(obj["d"]), tau, (grid - 1) // 2)


def _check_same(*geoms):
    g0 = geoms[0]
    for g in geoms[1:]:
        if g != g0:
            raise GeometryMismatchError("fields live on different tori/grids")
    return g0


@dataclass(frozen=True, eq=False)
class ModeArray:
    """Fourier coefficients of a field, ``f = sum_k c_k exp(2 pi i k.x)``.

    ``coeffs`` is stored in FFT order along the grid axes (see
    :attr:`TorusGeometry.frequencies`), trailing matrix axes unchanged.
    """

    geometry: TorusGeometry
    coeffs: np.ndarray

    def coefficient(self, freq):
        idx = tuple(int(k) % self.geometry.M for k in freq)
        return self.coeffs[idx]

    def centered(self):
        """Coefficients with the zero frequency moved to index ``N`` on every axis."""
        return np.fft.fftshift(self.coeffs, axes=self.geometry.grid_axes)

    def degree(self, tol=1e-12):
        """Largest ``max_a |k_a|`` over coefficients above ``tol``."""
        g = self.geometry
        mag = np.abs(self.coeffs).reshape(g.grid_shape + (-1,)).max(axis=-1)
        idx = np.argwhere(mag > tol)
        if len(idx) == 0:
            return 0
        return int(np.abs(g.frequencies[idx]).max())


@dataclass(frozen=True, eq=False)
class Field:
    """Matrix-valued function on the grid of a torus.

    ``values`` has shape ``geometry.grid_shape + (n, m)``; scalar fields use
    ``1 x 1`` matrices.
    """

    geometry: TorusGeometry
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex)
        g = self.geometry
        if v.shape[: g.ndim_real] != g.grid_shape or v.ndim != g.ndim_real + 2:
            raise GeometryMismatchError(
                f"values of shape {v.shape} do not match grid {g.grid_shape} + (n, m)"
            )
        if not np.all(np.isfinite(v)):
            raise ValueError("field values must be finite")
        object.__setattr__(self, "values", v)

    # constructors -------------------------------------------------------
    @classmethod
    def constant(cls, geometry, matrix):
        m = np.atleast_2d(np.asarray(matrix, dtype=complex))
        return cls(geometry, np.broadcast_to(m, geometry.grid_shape + m.shape).copy())

    @classmethod
    def zeros(cls, geometry, shape=(1, 1)):
        return cls(geometry, np.zeros(geometry.grid_shape + tuple(shape), dtype=complex))

    @classmethod
    def scalar(cls, geometry, values):
        v = np.broadcast_to(np.asarray(values, dtype=complex), geometry.grid_shape)
        return cls(geometry, v[..., None, None].copy())

    @classmethod
    def from_function(cls, geometry, fn):
        """``fn(*coords)`` receives the broadcast grid coordinates ``(s_1, t_1, ..)``."""
        out = np.asarray(fn(*geometry.coordinates()), dtype=complex)
        if out.ndim <= geometry.ndim_real:
            return cls.scalar(geometry, out)
        shape = geometry.grid_shape + out.shape[geometry.ndim_real:]
        return cls(geometry, np.broadcast_to(out, shape).copy())

    @classmethod
    def single_mode(cls, geometry, freq, matrix=1.0):
        x = geometry.coordinates()
        phase = sum(TWO_PI_I * k * xa for k, xa in zip(freq, x))
        m = np.atleast_2d(np.asarray(matrix, dtype=complex))
        return cls(geometry, np.exp(phase)[..., None, None] * m)

    # shape helpers ------------------------------------------------------
    @property
    def matrix_shape(self):
        return self.values.shape[-2:]

    @property
    def is_scalar(self):
        return self.matrix_shape == (1, 1)

    def max_norm(self):
        return float(np.abs(self.values).max()) if self.values.size else 0.0

    def _coerce(self, other):
        if isinstance(other, Field):
            _check_same(self.geometry, other.geometry)
            return other.values
        return other

    # arithmetic ---------------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, Field):
            other = Field.constant(self.geometry, other)
        return Field(self.geometry, self.values + self._coerce(other))

    __radd__ = __add__

    def __sub__(self, other):
        if not isinstance(other, Field):
            other = Field.constant(self.geometry, other)
        return Field(self.geometry, self.values - self._coerce(other))

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return Field(self.geometry, -self.values)

    def __mul__(self, other):
        """Scalar multiplication (numbers or scalar fields)."""
        if isinstance(other, Field):
            _check_same(self.geometry, other.geometry)
            if other.is_scalar:
                return Field(self.geometry, self.values * other.values)
            if self.is_scalar:
                return Field(self.geometry, other.values * self.values)
            raise ValueError("use multiply() / @ for matrix-valued products")
        return Field(self.geometry, self.values * other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return Field(self.geometry, self.values / other)

    def __matmul__(self, other):
        return multiply(self, other)

    def conj_transpose(self):
        return Field(self.geometry, np.conj(np.swapaxes(self.values, -1, -2)))

    def trace(self):
        return Field.scalar(self.geometry, np.trace(self.values, axis1=-2, axis2=-1))

    def at(self, index):
        """Matrix value at a grid index tuple."""
        return self.values[tuple(index)]

    # calculus -----------------------------------------------------------
    def deriv(self, axis):
        return deriv_real(self, axis)

    def __repr__(self):
        return f"Field(d={self.geometry.d}, N={self.geometry.N}, matrix={self.matrix_shape})"


def to_modes(f):
    g = f.geometry
    return ModeArray(g, np.fft.fftn(f.values, axes=g.grid_axes) / g.M ** g.ndim_real)


def from_modes(m):
    g = m.geometry
    return Field(g, np.fft.ifftn(m.coeffs * g.M ** g.ndim_real, axes=g.grid_axes))


def _spectral_apply(f, multiplier):
    g = f.geometry
    c = np.fft.fftn(f.values, axes=g.grid_axes)
    c = c * multiplier[..., None, None]
    return Field(g, np.fft.ifftn(c, axes=g.grid_axes))


def _broadcast_symbol(g, axis):
    return np.broadcast_to(g.wavenumbers(axis), g.grid_shape)


def deriv_real(f, axis):
    """Spectral derivative along real axis ``axis`` (``2k`` = s_k, ``2k+1`` = t_k)."""
    g = f.geometry
    if not 0 <= axis < g.ndim_real:
        raise ValueError(f"axis {axis} out of range for d={g.d}")
    return _spectral_apply(f, _broadcast_symbol(g, axis))


def _z_symbols(g, k):
    tau = g.tau[k]
    ds = _broadcast_symbol(g, 2 * k)
    dt = _broadcast_symbol(g, 2 * k + 1)
    den = tau - np.conj(tau)
    dz = (dt - np.conj(tau) * ds) / den
    dzbar = (tau * ds - dt) / den
    return dz, dzbar


def deriv_z(f, k):
    """``d/dz_k = (d/dt_k - conj(tau_k) d/ds_k) / (tau_k - conj(tau_k))``."""
    return _spectral_apply(f, _z_symbols(f.geometry, k)[0])


def deriv_zbar(f, k):
    """``d/dzbar_k = (tau_k d/ds_k - d/dt_k) / (tau_k - conj(tau_k))``."""
    return _spectral_apply(f, _z_symbols(f.geometry, k)[1])


def multiply(f, g):
    """Pointwise matrix product ``f(x) g(x)`` on the grid."""
    geom = _check_same(f.geometry, g.geometry)
    if f.matrix_shape[1] != g.matrix_shape[0]:
        raise GeometryMismatchError(
            f"incompatible matrix sizes {f.matrix_shape} @ {g.matrix_shape}"
        )
    return Field(geom, f.values @ g.values)


def integrate(f):
    """``int f ds dt`` over the unit parameter square of each factor.

    Equals the zero-frequency Fourier coefficient (trapezoid rule); returns a
    complex number for scalar fields and a matrix otherwise.
    """
    g = f.geometry
    total = f.values.mean(axis=g.grid_axes)
    if f.is_scalar:
        return complex(total[0, 0])
    return total


def evaluate_at(f, point):
    """Trigonometric interpolation of ``f`` at an arbitrary real point (length ``2d``).

    Exact for band-limited fields; cost is one contraction per real axis.
    """
    g = f.geometry
    c = np.fft.fftn(f.values, axes=g.grid_axes) / g.M ** g.ndim_real
    for x in point:
        phases = np.exp(TWO_PI_I * g.frequencies * x)
        c = np.tensordot(phases, c, axes=([0], [0]))
    return c


def interpolate_axis(values, geometry, axis, x):
    """Interpolate grid ``values`` along one real ``axis`` at offsets ``x``.

    ``values`` has the grid axes first (other axes may have been sliced to
    length one).  Returns an array with ``axis`` replaced by ``len(x)`` points.
    """
    c = np.fft.fft(values, axis=axis) / geometry.M
    phases = np.exp(TWO_PI_I * np.outer(np.atleast_1d(x), geometry.frequencies))
    moved = np.moveaxis(c, axis, -1)
    out = np.tensordot(moved, phases, axes=([-1], [1]))
    return np.moveaxis(out, -1, axis)
