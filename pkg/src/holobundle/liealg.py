"""Matrix Lie algebras and groups.

Algebra elements and group elements are plain complex ``ndarray`` objects of
shape ``(..., n, n)``; every function here broadcasts over the leading axes so
the same code serves single matrices and whole grids of matrices (fields).

Convention sheet for the invariant form
---------------------------------------
The invariant form is the trace form ``<x, y> = tr(xy)``.  On the simple
built-in algebras the Killing form is a fixed multiple of it:

========  ======================  ==========
algebra   Killing(x, y)           ratio
========  ======================  ==========
gl1       0 (abelian)             --
sl2, su2  4 tr(xy)                4
sl3, su3  6 tr(xy)                6
sl(n)     2n tr(xy)               2n
========  ======================  ==========

:meth:`MatrixLieAlgebra.killing_ratio` recomputes the ratio numerically.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import product

import numpy as np

from .errors import AlgebraMismatchError, LogBranchError, SingularElementError

_EXPM_TAYLOR_ORDER = 18
_EXPM_THETA = 0.5
_LOGM_SQRT_TARGET = 0.25
_DET_FLOOR = 1e-12


def _as_matrix(x):
    x = np.asarray(x, dtype=complex)
    if x.ndim < 2 or x.shape[-1] != x.shape[-2]:
        raise AlgebraMismatchError(f"expected square matrices, got shape {x.shape}")
    return x


def _same_algebra(a, b):
    if a.shape[-2:] != b.shape[-2:]:
        raise AlgebraMismatchError(
            f"algebra mismatch: {a.shape[-2:]} vs {b.shape[-2:]}"
        )


def bracket(a, b):
    """Commutator ``ab - ba`` (pointwise over leading axes)."""
    a, b = _as_matrix(a), _as_matrix(b)
    _same_algebra(a, b)
    return a @ b - b @ a


def inner(x, y):
    """Trace form ``tr(xy)``; returns an array of the broadcast leading shape."""
    x, y = _as_matrix(x), _as_matrix(y)
    _same_algebra(x, y)
    # tr(xy) = sum_ij x_ij y_ji
    return np.einsum("...ij,...ji->...", x, y)


def check_invertible(g):
    g = _as_matrix(g)
    det = np.linalg.det(g)
    if not np.all(np.isfinite(det)) or np.any(np.abs(det) <= _DET_FLOOR):
        raise SingularElementError("group element is singular (|det| <= 1e-12)")
    return g


def inv(g):
    """Inverse of a group element, refusing singular input."""
    return np.linalg.inv(check_invertible(g))


def ad_action(g, x):
    """Adjoint action ``Ad(g)x = g x g^{-1}``."""
    g = _as_matrix(g)
    x = _as_matrix(x)
    _same_algebra(g, x)
    return g @ x @ inv(g)


def _taylor_order(norm):
    """Smallest order whose truncation term ``norm^(m+1)/(m+1)!`` is below 1e-17."""
    term = 1.0
    for m in range(1, _EXPM_TAYLOR_ORDER + 1):
        term *= norm / m
        if term * norm / (m + 1) < 1e-17:
            return m
    return _EXPM_TAYLOR_ORDER


def expm(x):
    """Matrix exponential by scaling and squaring of a Taylor polynomial.

    Each matrix is scaled by its own power of two; the Taylor order is the
    smallest one that is accurate for the largest scaled norm in the batch.
    """
    x = _as_matrix(x)
    n = x.shape[-1]
    norm1 = np.abs(x).sum(axis=-2).max(axis=-1)
    with np.errstate(divide="ignore"):
        s = np.ceil(np.log2(np.maximum(norm1, 1e-300) / _EXPM_THETA))
    s = np.maximum(s, 0).astype(int)
    a = x / np.ldexp(1.0, s)[..., None, None]
    eye = np.broadcast_to(np.eye(n, dtype=complex), x.shape)
    result = eye.copy()
    for k in range(_taylor_order(np.abs(a).sum(axis=-2).max(initial=0.0)), 0, -1):
        result = eye + (a @ result) / k
    s_max = int(s.max()) if s.size else 0
    for j in range(s_max):
        mask = s > j
        result[mask] = result[mask] @ result[mask]
    return result


def _sqrtm_db(a):
    # Denman-Beavers iteration; spectrum is already known to avoid (-inf, 0].
    y = a.copy()
    z = np.broadcast_to(np.eye(a.shape[-1], dtype=complex), a.shape).copy()
    for _ in range(100):
        y_next = 0.5 * (y + np.linalg.inv(z))
        z = 0.5 * (z + np.linalg.inv(y))
        delta = np.abs(y_next - y).max() if y.size else 0.0
        y = y_next
        if delta <= 1e-15 * max(1.0, np.abs(y).max()):
            break
    return y


def logm(g):
    """Principal matrix logarithm by inverse scaling and squaring.

    Raises :class:`LogBranchError` if an eigenvalue lies on the closed
    negative real axis (or at zero).
    """
    g = check_invertible(g)
    ev = np.linalg.eigvals(g)
    on_cut = (ev.real <= 0) & (np.abs(ev.imag) <= 1e-12 * np.maximum(np.abs(ev), 1.0))
    if np.any(on_cut):
        raise LogBranchError("log branch: spectrum touches the negative real axis")
    n = g.shape[-1]
    eye = np.eye(n, dtype=complex)
    x = g.copy()
    k = np.zeros(g.shape[:-2], dtype=int)
    for _ in range(64):
        dist = np.abs(x - eye).sum(axis=-2).max(axis=-1)
        mask = dist > _LOGM_SQRT_TARGET
        if not np.any(mask):
            break
        x[mask] = _sqrtm_db(x[mask])
        k[mask] += 1
    # log(X) = 2 atanh(Z), Z = (X - I)(X + I)^{-1}
    z = (x - eye) @ np.linalg.inv(x + eye)
    z2 = z @ z
    term = z.copy()
    total = z.copy()
    for j in range(1, 20):
        term = term @ z2
        total = total + term / (2 * j + 1)
    return 2.0 * np.ldexp(1.0, k)[..., None, None] * total


def dexp_left(x, dx):
    """``exp(x)^{-1} . D exp(x)[dx]``, the left-trivialised derivative of exp.

    Uses the block identity ``exp([[x, dx], [0, x]]) = [[e^x, De^x[dx]], [0, e^x]]``,
    which is exact up to the accuracy of :func:`expm`.
    """
    x, dx = _as_matrix(x), _as_matrix(dx)
    _same_algebra(x, dx)
    x, dx = np.broadcast_arrays(x, dx)
    n = x.shape[-1]
    block = np.zeros(x.shape[:-2] + (2 * n, 2 * n), dtype=complex)
    block[..., :n, :n] = x
    block[..., n:, n:] = x
    block[..., :n, n:] = dx
    e = expm(block)
    return np.linalg.inv(e[..., :n, :n]) @ e[..., :n, n:]


@dataclass(frozen=True, eq=False)
class MatrixLieAlgebra:
    """A complex matrix Lie algebra given by a basis of ``n x n`` matrices.

    The constructor validates linear independence of the basis and closure
    under the commutator (residual below ``1e-12`` relative to the basis scale).
    """

    name: str
    basis: np.ndarray
    closure_tol: float = field(default=1e-12, repr=False)

    def __post_init__(self):
        basis = np.asarray(self.basis, dtype=complex)
        if basis.ndim != 3 or basis.shape[1] != basis.shape[2] or len(basis) == 0:
            raise ValueError("basis must be a non-empty list of square matrices")
        object.__setattr__(self, "basis", basis)
        flat = basis.reshape(len(basis), -1)
        if np.linalg.matrix_rank(flat, tol=1e-10) != len(basis):
            raise ValueError(f"basis of {self.name!r} is linearly dependent")
        scale = max(1.0, np.abs(basis).max() ** 2)
        for a, b in product(range(len(basis)), repeat=2):
            c = bracket(basis[a], basis[b])
            if self._residual(c) > self.closure_tol * scale:
                raise ValueError(f"basis of {self.name!r} is not closed under the bracket")

    @property
    def n(self):
        """Matrix size."""
        return self.basis.shape[1]

    @property
    def dim(self):
        return self.basis.shape[0]

    @property
    def is_abelian(self):
        return all(
            np.abs(bracket(a, b)).max() < 1e-14 for a, b in product(self.basis, repeat=2)
        )

    @cached_property
    def _pinv(self):
        return np.linalg.pinv(self.basis.reshape(self.dim, -1).T)

    def coords(self, x):
        """Coordinates of ``x`` (shape ``(..., n, n)``) in the basis."""
        x = _as_matrix(x)
        if x.shape[-2:] != (self.n, self.n):
            raise AlgebraMismatchError("algebra mismatch")
        flat = x.reshape(x.shape[:-2] + (-1,))
        return flat @ self._pinv.T

    def element(self, coeffs):
        coeffs = np.asarray(coeffs, dtype=complex)
        return np.tensordot(coeffs, self.basis, axes=([-1], [0]))

    def _residual(self, x):
        return float(np.abs(self.element(self.coords(x)) - x).max())

    def contains(self, x, tol=1e-10):
        """True if ``x`` lies in the span of the basis (projection residual < tol)."""
        try:
            return self._residual(x) < tol * max(1.0, float(np.abs(x).max()))
        except AlgebraMismatchError:
            return False

    def trace_gram(self):
        """Gram matrix ``tr(e_a e_b)`` of the basis."""
        return inner(self.basis[:, None], self.basis[None, :])

    def structure_constants(self):
        """``c[a, b, c]`` with ``[e_a, e_b] = sum_c c[a, b, c] e_c``."""
        br = bracket(self.basis[:, None], self.basis[None, :])
        return self.coords(br)

    def killing_ratio(self):
        """Ratio Killing/trace form, or ``None`` if not proportional (e.g. abelian)."""
        c = self.structure_constants()
        # ad(e_a)[c, b] = c[a, b, c]
        ad = np.transpose(c, (0, 2, 1))
        killing = np.einsum("aij,bji->ab", ad, ad)
        gram = self.trace_gram()
        if np.abs(killing).max() < 1e-12:
            return None
        idx = np.unravel_index(np.argmax(np.abs(gram)), gram.shape)
        ratio = killing[idx] / gram[idx]
        if np.abs(killing - ratio * gram).max() > 1e-9 * np.abs(killing).max():
            return None
        return complex(ratio)

    def random_element(self, rng, scale=1.0):
        coeffs = rng.standard_normal(self.dim) + 1j * rng.standard_normal(self.dim)
        return scale * self.element(coeffs) / np.sqrt(2 * self.dim)


def _unit(n, i, j):
    m = np.zeros((n, n), dtype=complex)
    m[i, j] = 1.0
    return m


def gl1():
    return MatrixLieAlgebra("gl1", [np.ones((1, 1))])


def sl(n):
    """``sl(n, C)`` with the Chevalley-style basis ``E_ij`` (i != j), ``E_ii - E_i+1,i+1``."""
    basis = [_unit(n, i, j) for i in range(n) for j in range(n) if i != j]
    basis += [_unit(n, i, i) - _unit(n, i + 1, i + 1) for i in range(n - 1)]
    return MatrixLieAlgebra(f"sl{n}", basis)


def su_complexified(n):
    """Complex span of ``i`` times the generalised Gell-Mann matrices."""
    basis = []
    for i in range(n):
        for j in range(i + 1, n):
            basis.append(1j * (_unit(n, i, j) + _unit(n, j, i)))
            basis.append(1j * (-1j * _unit(n, i, j) + 1j * _unit(n, j, i)))
    for k in range(1, n):
        diag = np.zeros(n)
        diag[:k] = 1.0
        diag[k] = -k
        basis.append(1j * np.diag(diag) * np.sqrt(2.0 / (k * (k + 1))))
    return MatrixLieAlgebra(f"su{n}", basis)


BUILTIN_ALGEBRAS = {
    "gl1": gl1,
    "sl2": lambda: sl(2),
    "sl3": lambda: sl(3),
    "su2": lambda: su_complexified(2),
    "su3": lambda: su_complexified(3),
    "su4": lambda: su_complexified(4),
}


def get_algebra(name):
    try:
        return BUILTIN_ALGEBRAS[name]()
    except KeyError:
        raise KeyError(
            f"unknown algebra {name!r}; available: {', '.join(sorted(BUILTIN_ALGEBRAS))}"
        ) from None


def from_basis(name, matrices):
    """Algebra from an explicit list of matrices (nested lists or arrays)."""
    return MatrixLieAlgebra(name, np.asarray(matrices, dtype=complex))
