"""Seeded random inputs for identity checks.

Random fields are trigonometric polynomials of low degree ``K`` per real axis.
The coefficient of frequency ``k`` is ``w(k) * x`` with ``x`` a random algebra
element (complex Gaussian coordinates) and ``w(k) = 1 / (1 + |k|^2)``, so the
mode variance decays as ``(1 + |k|^2)^-2``.  Keeping ``K`` small leaves room in
the band for the products that the identities differentiate.

Random gauge maps have to stay band-limited too, which rules out ``expm`` of a
random field for non-abelian algebras.  They are built as
``g0 (I + phi * Nil) g1`` with ``Nil`` nilpotent of order two, ``phi`` a scalar
trigonometric polynomial of degree one, and ``g0, g1`` constant group elements.
The inverse ``g1^-1 (I - phi * Nil) g0^-1`` is again a polynomial, so every
derived quantity has a known degree.  Abelian (``gl1``) maps use the generator
form ``exp(h)`` whose logarithmic derivative is exact.
"""

from __future__ import annotations

from itertools import combinations

import numpy as np

from . import liealg
from .forms import Form
from .gauge import GaugeMap, log_deriv_delbar
from .torus import Field


def rng_from_seed(seed):
    return np.random.default_rng(np.random.SeedSequence(int(seed) % 2**64))


def random_field(geometry, algebra, rng, degree=1, scale=1.0):
    """Band-limited ``algebra``-valued field with modes ``|k_a| <= degree``."""
    if degree > geometry.N:
        raise ValueError("degree exceeds the grid band")
    g = geometry
    coeffs = np.zeros(g.grid_shape + (algebra.n, algebra.n), dtype=complex)
    for idx in np.ndindex(*(2 * degree + 1,) * g.ndim_real):
        k = np.array(idx) - degree
        weight = 1.0 / (1.0 + float(k @ k))
        coeffs[tuple(k % g.M)] = scale * weight * algebra.random_element(rng)
    return Field(g, np.fft.ifftn(coeffs * g.M ** g.ndim_real, axes=g.grid_axes))


def random_scalar(geometry, rng, degree=1, scale=1.0):
    return random_field(geometry, liealg.gl1(), rng, degree, scale)


def random_form(geometry, algebra, rng, p, q, degree=1, scale=1.0):
    """Random ``algebra``-valued form of type ``(p, q)``."""
    d = geometry.d
    if p > d or q > d:
        raise ValueError(f"no ({p},{q})-forms on a torus of dimension {d}")
    comps = {}
    for hol in combinations(range(d), p):
        for anti in combinations(range(d, 2 * d), q):
            comps[hol + anti] = random_field(geometry, algebra, rng, degree, scale)
    return Form(geometry, p + q, comps, (algebra.n, algebra.n))


def random_one_form(geometry, algebra, rng, degree=1, scale=1.0):
    """Random 1-form with both ``(1,0)`` and ``(0,1)`` parts."""
    return random_form(geometry, algebra, rng, 1, 0, degree, scale) + random_form(
        geometry, algebra, rng, 0, 1, degree, scale
    )


def _random_nilpotent(algebra, rng):
    """Rank-one ``u v^T`` with ``v^T u = 0`` inside ``algebra``, or ``None``."""
    n = algebra.n
    if n < 2:
        return None
    for _ in range(8):
        u = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        v = v - (v @ u) / (u @ u) * u
        nil = np.outer(u, v)
        nil /= np.abs(nil).max()
        if algebra.contains(nil):
            return nil
    return None


def random_group_element(algebra, rng, scale=0.5):
    return liealg.expm(algebra.random_element(rng, scale))


def random_gauge_map(geometry, algebra, rng, scale=0.5):
    """Band-limited random gauge map (degree one per axis, inverse degree one).

    Falls back to ``exp(h)`` with a degree-one generator when the algebra has
    no rank-one nilpotents (``gl1`` and other abelian algebras).
    """
    nil = _random_nilpotent(algebra, rng)
    if nil is None:
        h = random_field(geometry, algebra, rng, degree=1, scale=scale)
        return GaugeMap.from_generator(h)
    g0 = random_group_element(algebra, rng, scale)
    g1 = random_group_element(algebra, rng, scale)
    phi = random_scalar(geometry, rng, degree=1, scale=scale)
    eye = np.eye(algebra.n)
    values = g0 @ (eye + phi.values * nil) @ g1
    return GaugeMap(geometry, values)


def holomorphic_free_exact(geometry, algebra, rng, scale=0.5):
    """``(omega, gamma)`` with ``omega = gamma^-1 delbar gamma``; ``omega`` solves ``Fbar = 0``."""
    gamma = random_gauge_map(geometry, algebra, rng, scale)
    return log_deriv_delbar(gamma), gamma
