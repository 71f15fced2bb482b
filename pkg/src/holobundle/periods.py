"""Periods of flat connection forms and recovery of primitives.

For a 1-form ``omega`` with ``F(omega) = 0`` the equation ``S^{-1} dS = omega``
has a solution ``S`` on the universal cover ``R^{2d}`` with ``S(0) = e``.  Since
``omega`` is periodic, ``S(m + e_k) = c_k S(m)`` for constants ``c_k``, the
periods.  They are computed by integrating ``S' = S A(u)`` along the straight
generator path ``u -> u e_k``.

The integrator is the fourth-order commutator-free Magnus scheme with two
Gauss nodes; every step multiplies by exponentials of algebra elements, so
``S`` stays in the group.  Each solve is repeated with twice the steps and the
two answers are compared (:class:`IntegrationError` when they disagree).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import forms, liealg, torus
from .errors import BidegreeError, CurvatureObstructionError, IntegrationError

STEPS_PER_UNIT = 256
RICHARDSON_TOL = 1e-6
FLATNESS_TOL = 1e-8

_SQ3 = np.sqrt(3.0)
_NODES = (0.5 - _SQ3 / 6, 0.5 + _SQ3 / 6)
_A1 = 0.25 - _SQ3 / 6
_A2 = 0.25 + _SQ3 / 6


def cf4_step(s, a1, a2, h):
    """One step of ``S' = S A``: ``S exp(h(a_2 A1 + a_1 A2)) exp(h(a_1 A1 + a_2 A2))``.

    ``a1``, ``a2`` are ``A`` at the two Gauss nodes; everything broadcasts.
    """
    first = liealg.expm(h * (_A2 * a1 + _A1 * a2))
    second = liealg.expm(h * (_A1 * a1 + _A2 * a2))
    return s @ first @ second


def integrate_right(sampler, steps, s0):
    """Solve ``S' = S A(u)`` on ``u in [0, 1]`` with ``steps`` CF4 steps.

    ``sampler(u)`` returns ``A`` at the parameter values ``u`` (1-D array),
    with shape ``(len(u), ..., n, n)``.
    """
    h = 1.0 / steps
    u0 = np.arange(steps) * h
    a1 = sampler(u0 + _NODES[0] * h)
    a2 = sampler(u0 + _NODES[1] * h)
    s = s0
    for j in range(steps):
        s = cf4_step(s, a1[j], a2[j], h)
    return s


def _real_components(omega):
    """Coefficient fields ``omega(d/dx_a)`` for every real axis."""
    if omega.degree != 1:
        raise BidegreeError("periods need a 1-form")
    g = omega.geometry
    eye = np.eye(g.ndim_real)
    return [omega.evaluate(eye[a]) for a in range(g.ndim_real)]


def _line_sampler(omega, start, direction):
    """``u -> omega_{x(u)}(v)`` on the line ``x(u) = start + u v`` (trigonometric interpolation)."""
    g = omega.geometry
    comps = _real_components(omega)
    combined = sum(direction[a] * comps[a].values for a in range(g.ndim_real) if direction[a] != 0)
    coeffs = np.fft.fftn(combined, axes=g.grid_axes) / g.M ** g.ndim_real
    freqs = g.frequencies
    phase0 = [np.exp(torus.TWO_PI_I * freqs * start[a]) for a in range(g.ndim_real)]
    for a in range(g.ndim_real):
        shape = [1] * g.ndim_real + [1, 1]
        shape[a] = g.M
        coeffs = coeffs * phase0[a].reshape(shape)

    def sampler(u):
        u = np.atleast_1d(u)
        out = np.broadcast_to(coeffs, (len(u),) + coeffs.shape)
        for a in range(g.ndim_real):
            ph = np.exp(torus.TWO_PI_I * np.outer(u * direction[a], freqs))
            out = np.einsum("um,um...->u...", ph, out)
        return out

    return sampler


def check_flat(omega, tol=FLATNESS_TOL):
    """Raise :class:`CurvatureObstructionError` unless ``F(omega)`` vanishes to ``tol``.

    The test is relative: ``||F|| < tol * max(1, ||d omega||, ||omega||^2)``,
    since rounding in either term of ``F`` scales with its size.  Returns ``||F||``.
    """
    dw = forms.ext_d(omega)
    half = forms.form_bracket(omega, omega) * 0.5
    curv = (dw + half).max_norm()
    ref = max(1.0, dw.max_norm(), omega.max_norm() ** 2)
    if curv >= tol * ref:
        raise CurvatureObstructionError(
            f"curvature obstruction: ||F(omega)|| = {curv:.3e} >= {tol:.1e} * {ref:.3e}"
        )
    return curv


def transport(omega, start, end, steps_per_unit=STEPS_PER_UNIT, check=True):
    """Solution of ``S^{-1} dS = omega`` along the straight segment ``start -> end`` with ``S(start) = e``."""
    start = np.asarray(start, dtype=float)
    direction = np.asarray(end, dtype=float) - start
    length = float(np.abs(direction).sum())
    steps = max(1, int(np.ceil(steps_per_unit * max(length, 1e-300))))
    n = omega.matrix_shape[0]
    sampler = _line_sampler(omega, start, direction)
    eye = np.eye(n, dtype=complex)
    s = integrate_right(sampler, steps, eye)
    if check:
        s2 = integrate_right(sampler, 2 * steps, eye)
        _richardson(s, s2)
    return s


def _richardson(s, s2):
    err = float(np.abs(s - s2).max())
    if not np.isfinite(err) or err > RICHARDSON_TOL * max(1.0, float(np.abs(s2).max())):
        raise IntegrationError(f"integrator step check failed (step-halving change {err:.3e})")
    return err


@dataclass(frozen=True, eq=False)
class PeriodData:
    """Periods ``c_k = S(m0 + e_k)`` along the ``2d`` generator loops.

    ``generators`` are the real unit vectors ``e_k`` (``(s_1, t_1, ...)`` order).
    ``trivial`` is True when every period is the identity to ``tol``, in which
    case ``omega = delta(f)`` for a global ``f``.
    """

    periods: tuple
    base_point: tuple
    generators: tuple
    curvature: float
    tol: float = 1e-8
    integration_error: float = field(default=0.0)

    @property
    def trivial(self):
        eye = np.eye(self.periods[0].shape[-1])
        return all(np.abs(c - eye).max() < self.tol for c in self.periods)

    def max_commutator(self):
        cs = self.periods
        return max(
            (float(np.abs(a @ b - b @ a).max()) for i, a in enumerate(cs) for b in cs[i + 1 :]),
            default=0.0,
        )

    def to_dict(self):
        return {
            "base_point": list(self.base_point),
            "periods": [{"re": c.real.tolist(), "im": c.imag.tolist()} for c in self.periods],
            "trivial": bool(self.trivial),
            "curvature": self.curvature,
            "max_commutator": self.max_commutator(),
        }


def solve_periods(omega, base_point=None, steps_per_unit=STEPS_PER_UNIT, flat_tol=FLATNESS_TOL, tol=1e-8):
    """Periods of a flat 1-form along the generators of the lattice.

    Raises
    ------
    CurvatureObstructionError
        If ``||F(omega)|| >= flat_tol``.
    IntegrationError
        If halving the step changes a period by more than ``1e-6``.
    """
    g = omega.geometry
    curv = check_flat(omega, flat_tol)
    m0 = np.zeros(g.ndim_real) if base_point is None else np.asarray(base_point, dtype=float)
    eye = np.eye(g.ndim_real)
    periods = []
    worst = 0.0
    for a in range(g.ndim_real):
        sampler = _line_sampler(omega, m0, eye[a])
        c = integrate_right(sampler, steps_per_unit, np.eye(omega.matrix_shape[0], dtype=complex))
        c2 = integrate_right(sampler, 2 * steps_per_unit, np.eye(omega.matrix_shape[0], dtype=complex))
        worst = max(worst, _richardson(c, c2))
        periods.append(c2)
    return PeriodData(
        tuple(periods),
        tuple(float(x) for x in m0),
        tuple(tuple(int(x) for x in row) for row in eye),
        curv,
        tol,
        worst,
    )


def loop_period(omega, windings, base_point=None, steps_per_unit=STEPS_PER_UNIT):
    """Transport along the straight path ``m0 -> m0 + windings``; this is the period of that loop class."""
    g = omega.geometry
    m0 = np.zeros(g.ndim_real) if base_point is None else np.asarray(base_point, dtype=float)
    return transport(omega, m0, m0 + np.asarray(windings, dtype=float), steps_per_unit)


def _axis_sampler(comp_values, geometry, axis, offsets):
    """Values of one real-frame coefficient along ``axis`` at fractional ``offsets``."""
    return torus.interpolate_axis(comp_values, geometry, axis, offsets)


def recover_primitive(omega, steps_per_unit=STEPS_PER_UNIT, check=True):
    """Grid values of the solution ``S`` of ``S^{-1} dS = omega`` with ``S(0) = e``.

    ``S`` at a node ``x`` is transported along an axis-parallel staircase from
    the origin: first along ``s_1`` (other coordinates zero), then ``t_1``, and
    so on.  Each leg is a concatenation of straight segments between
    consecutive grid nodes.  For flat ``omega`` with trivial periods this is
    the global primitive; in general it is the staircase transport.
    """
    g = omega.geometry
    n = omega.matrix_shape[0]
    comps = [c.values for c in _real_components(omega)]
    sub = max(1, int(np.ceil(steps_per_unit / g.M)))

    def sweep(substeps):
        # s holds S on the nodes reached so far; later axes stay at index 0
        s = np.eye(n, dtype=complex).reshape((1,) * g.ndim_real + (n, n))
        for axis in range(g.ndim_real):
            # coefficient along this axis, earlier axes on the full grid, later axes at index 0
            index = tuple(slice(None) if b <= axis else slice(0, 1) for b in range(g.ndim_real))
            vals = comps[axis][index]
            h = 1.0 / (g.M * substeps)
            legs = [s]
            cur = s
            for node in range(g.M - 1):
                base = node / g.M + np.arange(substeps) * h
                a1 = _axis_sampler(vals, g, axis, base + _NODES[0] * h)
                a2 = _axis_sampler(vals, g, axis, base + _NODES[1] * h)
                for j in range(substeps):
                    sl = [slice(None)] * g.ndim_real
                    sl[axis] = slice(j, j + 1)
                    cur = cf4_step(cur, a1[tuple(sl)], a2[tuple(sl)], h)
                legs.append(cur)
            s = np.concatenate(legs, axis=axis)
        return s

    s = sweep(sub)
    if check:
        _richardson(s, sweep(2 * sub))
    return torus.Field(g, s)


def primitive_deviation(primitive, f):
    """``max |S - f(0)^{-1} f|`` after aligning by one left translation."""
    fv = f.values
    origin = fv[(0,) * f.geometry.ndim_real]
    aligned = np.linalg.inv(origin) @ fv
    return float(np.abs(primitive.values - aligned).max())
