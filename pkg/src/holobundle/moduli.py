"""Commuting pairs in SU(n), torus reduction and Weyl canonicalization.

Flat ``SU(n)`` bundles over a 1-dimensional torus correspond to commuting
pairs ``(x, y)`` up to simultaneous conjugation.  Such a pair lies in a common
maximal torus, so it is described by two lists of phases ``(theta, phi)``; the
Weyl group ``S_n`` permutes the coordinate pairs ``(theta_i, phi_i)`` together.

:func:`torus_reduce` diagonalizes both matrices with one unitary (Schur form
of ``x``, eigenvalue clusters, then Schur form of ``y`` inside each cluster).
:func:`weyl_canonicalize` picks a representative by sorting the pairs.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import NotCommutingError

COMMUTE_TOL = 1e-8
CLUSTER_TOL = 1e-7
DIAG_TOL = 1e-7
ORBIT_TOL = 1e-6
TWO_PI = 2 * np.pi


@dataclass(frozen=True, eq=False)
class CommutingPair:
    """Two commuting ``n x n`` matrices (``||xy - yx|| < 1e-8``)."""

    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.x, dtype=complex)
        y = np.asarray(self.y, dtype=complex)
        if x.shape != y.shape or x.ndim != 2 or x.shape[0] != x.shape[1]:
            raise ValueError("a commuting pair needs two square matrices of the same size")
        comm = float(np.abs(x @ y - y @ x).max())
        if comm >= COMMUTE_TOL:
            raise NotCommutingError(
                f"not simultaneously diagonalizable: ||xy - yx|| = {comm:.3e}"
            )
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    @property
    def n(self):
        return self.x.shape[0]

    def conjugate(self, u):
        """``(u x u^-1, u y u^-1)``."""
        uinv = np.linalg.inv(u)
        return CommutingPair(u @ self.x @ uinv, u @ self.y @ uinv)


@dataclass(frozen=True, eq=False)
class TorusPair:
    """Diagonal phases ``(theta, phi)`` of a commuting pair in a maximal torus."""

    theta: np.ndarray
    phi: np.ndarray
    special: bool = True

    def __post_init__(self):
        th = np.asarray(self.theta, dtype=complex).ravel()
        ph = np.asarray(self.phi, dtype=complex).ravel()
        if th.shape != ph.shape:
            raise ValueError("theta and phi must have the same length")
        for name, v in (("theta", th), ("phi", ph)):
            if np.abs(np.abs(v) - 1).max(initial=0.0) > 1e-8:
                raise ValueError(f"{name} entries must have unit modulus")
            if self.special and abs(np.prod(v) - 1) > 1e-8:
                raise ValueError(f"{name} entries must multiply to 1")
        object.__setattr__(self, "theta", th)
        object.__setattr__(self, "phi", ph)

    @property
    def n(self):
        return len(self.theta)

    def permuted(self, perm):
        perm = list(perm)
        return TorusPair(self.theta[perm], self.phi[perm], self.special)

    def angles(self):
        return _angles(self.theta), _angles(self.phi)

    def to_dict(self):
        return {
            "theta": [[z.real, z.imag] for z in self.theta],
            "phi": [[z.real, z.imag] for z in self.phi],
        }


def _angles(z, tol=CLUSTER_TOL):
    """``arg z`` in ``[0, 2 pi)``, values within ``tol`` of ``2 pi`` snapped to 0."""
    a = np.mod(np.angle(z), TWO_PI)
    return np.where(a > TWO_PI - tol, 0.0, a)


def _clusters(values, tol):
    """Single-linkage clusters of complex ``values`` (lists of indices)."""
    n = len(values)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if abs(values[i] - values[j]) < tol:
                parent[find(i)] = find(j)
    groups = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return sorted(groups.values())


def torus_reduce(pair, cluster_tol=CLUSTER_TOL):
    """Phases of ``x`` and ``y`` in a common diagonalizing unitary basis.

    Returns ``(TorusPair, u)`` with ``u^* x u`` and ``u^* y u`` diagonal.

    Raises
    ------
    NotCommutingError
        If the pair cannot be diagonalized by one unitary (off-diagonal
        residual above ``1e-7``), for instance because it is not normal.
    """
    x, y = pair.x, pair.y
    tx, zx = scipy.linalg.schur(x, output="complex")
    lam = np.diag(tx)
    cols = []
    for group in _clusters(lam, cluster_tol):
        zc = zx[:, group]
        block = zc.conj().T @ y @ zc
        _, w = scipy.linalg.schur(block, output="complex")
        cols.append(zc @ w)
    u = np.concatenate(cols, axis=1)
    dx = u.conj().T @ x @ u
    dy = u.conj().T @ y @ u
    off = max(
        float(np.abs(dx - np.diag(np.diag(dx))).max()),
        float(np.abs(dy - np.diag(np.diag(dy))).max()),
    )
    if off > DIAG_TOL * max(1.0, float(np.abs(x).max()), float(np.abs(y).max())):
        raise NotCommutingError(
            f"not simultaneously diagonalizable: off-diagonal residual {off:.3e}"
        )
    theta, phi = np.diag(dx).copy(), np.diag(dy).copy()
    special = abs(np.prod(theta) - 1) < 1e-8 and abs(np.prod(phi) - 1) < 1e-8
    return TorusPair(theta, phi, special), u


@dataclass(frozen=True, eq=False)
class WeylOrbitClass:
    """Canonical representative of the ``S_n``-orbit of a :class:`TorusPair`."""

    rep: TorusPair

    def distance(self, other):
        if self.rep.n != other.rep.n:
            return np.inf
        return float(
            max(
                np.abs(self.rep.theta - other.rep.theta).max(),
                np.abs(self.rep.phi - other.rep.phi).max(),
            )
        )

    def equals(self, other, tol=ORBIT_TOL):
        return self.distance(other) < tol

    def orbit_hash(self, decimals=6):
        """SHA-256 of the canonical angles rounded to ``decimals`` places.

        Rounding can split orbits whose angles straddle a rounding boundary;
        use :meth:`equals` for comparisons.
        """
        th, ph = self.rep.angles()
        payload = json.dumps(
            [[round(float(a), decimals) + 0.0 for a in th], [round(float(b), decimals) + 0.0 for b in ph]]
        )
        return hashlib.sha256(payload.encode()).hexdigest()

    def to_dict(self):
        th, ph = self.rep.angles()
        return {
            **self.rep.to_dict(),
            "theta_angle": [float(a) for a in th],
            "phi_angle": [float(b) for b in ph],
            "hash": self.orbit_hash(),
        }


def canonical_order(t, tol=CLUSTER_TOL):
    """Permutation sorting the pairs by ``arg theta``, then ``arg phi`` inside ``theta`` clusters.

    ``theta`` angles closer than ``tol`` count as equal, so the order does not
    depend on rounding noise in repeated eigenvalues.
    """
    th, ph = t.angles()
    order = list(np.lexsort((ph, th)))
    # regroup theta values that agree to tol, then sort each group by phi
    if not order:
        return []
    out, group = [], [order[0]]
    for i in order[1:]:
        if th[i] - th[group[-1]] < tol:
            group.append(i)
        else:
            out.extend(sorted(group, key=lambda j: (ph[j], th[j])))
            group = [i]
    out.extend(sorted(group, key=lambda j: (ph[j], th[j])))
    return out


def weyl_canonicalize(t):
    """Canonical representative of the Weyl orbit of ``t`` (idempotent, permutation invariant)."""
    return WeylOrbitClass(t.permuted(canonical_order(t)))


def orbit_class(pair):
    t, _ = torus_reduce(pair)
    return weyl_canonicalize(t)


def orbits_equal(p, q, tol=ORBIT_TOL):
    """True when two commuting pairs are simultaneously conjugate (canonical phases within ``tol``)."""
    return orbit_class(p).equals(orbit_class(q), tol)


# random inputs ----------------------------------------------------------

def random_unitary(n, rng):
    """Haar-distributed unitary via QR of a complex Gaussian matrix."""
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_special_unitary(n, rng):
    u = random_unitary(n, rng)
    return u / np.linalg.det(u) ** (1.0 / n)


def random_torus_phases(n, rng):
    """Unit phases with product 1."""
    a = rng.uniform(0, TWO_PI, n)
    a[-1] = -a[:-1].sum()
    return np.exp(1j * a)


def random_commuting_pair(n, rng, degenerate=False):
    """``(u diag(theta) u^*, u diag(phi) u^*)`` with random phases.

    ``degenerate=True`` repeats the first ``theta`` eigenvalue.
    """
    theta = random_torus_phases(n, rng)
    if degenerate and n == 2:
        theta[:] = rng.choice([-1.0, 1.0])
    elif degenerate:
        theta[1] = theta[0]
        theta[-1] = 1.0 / np.prod(theta[:-1])
    phi = random_torus_phases(n, rng)
    u = random_special_unitary(n, rng)
    uh = u.conj().T
    return CommutingPair(u @ np.diag(theta) @ uh, u @ np.diag(phi) @ uh)


def matrix_from_json(obj):
    """Matrix from ``{"re": .., "im": ..}`` or nested ``[re, im]`` pairs or real lists."""
    if isinstance(obj, dict):
        return np.asarray(obj["re"], dtype=float) + 1j * np.asarray(obj.get("im", 0.0), dtype=float)
    arr = np.asarray(obj, dtype=float)
    if arr.ndim == 3 and arr.shape[-1] == 2:
        return arr[..., 0] + 1j * arr[..., 1]
    return arr.astype(complex)
