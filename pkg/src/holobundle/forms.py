"""Matrix-valued differential forms on flat complex tori.

A :class:`Form` of degree ``k`` stores one :class:`~holobundle.torus.Field`
coefficient per increasing multi-index of basis 1-forms.  Basis labels
``0..d-1`` stand for ``dz_1..dz_d`` and ``d..2d-1`` for ``dzbar_1..dzbar_d``, so a
label tuple is canonical when sorted (holomorphic factors first).  The
``(p, q)`` type of a component is therefore read off its labels and never has
to be recovered numerically.

Forms are evaluated on vectors with the determinant convention
``(a ^ b)(X, Y) = a(X) b(Y) - a(Y) b(X)``, the convention under which the
bracket of 1-forms is ``[a, b](X, Y) = [a(X), b(Y)] - [a(Y), b(X)]``.

Wedge products whose degree exceeds ``2d`` return the zero form of that degree
rather than raising.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, permutations

import numpy as np

from . import torus
from .errors import BidegreeError, GeometryMismatchError
from .torus import Field, TorusGeometry


def _perm_sign(seq):
    seq = list(seq)
    sign = 1
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                sign = -sign
    return sign


def canonical(labels):
    """``(sign, sorted_labels)`` or ``(0, None)`` if a label repeats."""
    labels = tuple(labels)
    if len(set(labels)) != len(labels):
        return 0, None
    return _perm_sign(labels), tuple(sorted(labels))


def label_name(d, label):
    return f"dz{label + 1}" if label < d else f"dzbar{label - d + 1}"


def parse_label(d, name):
    if name.startswith("dzbar"):
        return d + int(name[5:]) - 1
    if name.startswith("dz"):
        return int(name[2:]) - 1
    raise ValueError(f"unknown basis 1-form {name!r}")


def key_type(d, key):
    p = sum(1 for lab in key if lab < d)
    return p, len(key) - p


_PRODUCTS = {
    "matmul": lambda a, b: a @ b,
    "bracket": lambda a, b: a @ b - b @ a,
    "inner": lambda a, b: np.einsum("...ij,...ji->...", a, b)[..., None, None],
}


@dataclass(frozen=True, eq=False)
class Form:
    """Matrix-valued ``k``-form with coefficients against ``dz``/``dzbar`` monomials.

    ``components`` maps sorted label tuples to coefficient fields.  Missing
    keys are zero.  Components of different ``(p, q)`` type may coexist (for
    example ``d`` of a ``(p, q)``-form); :attr:`bidegree` reports the common
    type when there is one.
    """

    geometry: TorusGeometry
    degree: int
    components: dict
    matrix_shape: tuple = (1, 1)

    def __post_init__(self):
        g = self.geometry
        comps = {}
        for key, coeff in self.components.items():
            key = tuple(key)
            sign, ckey = canonical(key)
            if len(key) != self.degree or any(not 0 <= lab < g.ndim_real for lab in key):
                raise BidegreeError(f"bad multi-index {key} for a {self.degree}-form, d={g.d}")
            if sign == 0:
                continue
            if ckey != key:
                raise BidegreeError(f"multi-index {key} is not sorted")
            if not isinstance(coeff, Field):
                coeff = Field.constant(g, coeff)
            if coeff.geometry != g:
                raise GeometryMismatchError("form coefficient on another torus")
            comps[key] = coeff
        shapes = {c.matrix_shape for c in comps.values()}
        if len(shapes) > 1:
            raise GeometryMismatchError("form coefficients have mixed matrix shapes")
        if shapes:
            object.__setattr__(self, "matrix_shape", shapes.pop())
        object.__setattr__(self, "components", comps)
        object.__setattr__(self, "matrix_shape", tuple(self.matrix_shape))

    # construction -------------------------------------------------------
    @classmethod
    def zero(cls, geometry, degree, matrix_shape=(1, 1)):
        return cls(geometry, degree, {}, tuple(matrix_shape))

    @classmethod
    def function(cls, f):
        """A 0-form from a field."""
        return cls(f.geometry, 0, {(): f}, f.matrix_shape)

    @classmethod
    def from_names(cls, geometry, terms, matrix_shape=None):
        """Build from ``{("dz1", "dzbar2"): coeff, ...}``; unsorted names are reordered with sign."""
        comps = {}
        degree = None
        for names, coeff in terms.items():
            if isinstance(names, str):
                names = (names,)
            labels = tuple(parse_label(geometry.d, n) for n in names)
            degree = len(labels) if degree is None else degree
            if len(labels) != degree:
                raise BidegreeError("mixed degrees in from_names")
            sign, key = canonical(labels)
            if sign == 0:
                continue
            if not isinstance(coeff, Field):
                coeff = Field.constant(geometry, coeff)
            coeff = coeff * sign
            comps[key] = comps[key] + coeff if key in comps else coeff
        if degree is None:
            raise BidegreeError("empty term list; use Form.zero")
        return cls(geometry, degree, comps, matrix_shape or (1, 1))

    @classmethod
    def from_real_frame(cls, geometry, terms, matrix_shape=None):
        """Build from coefficients against ``ds_k``/``dt_k`` monomials.

        ``terms`` maps tuples of real axes (``2k`` = s_k, ``2k+1`` = t_k) to fields.
        """
        q = np.linalg.inv(geometry.real_frame_matrix())  # e^a = sum_l q[a, l] theta_l
        result = None
        for axes, coeff in terms.items():
            if isinstance(axes, int):
                axes = (axes,)
            if not isinstance(coeff, Field):
                coeff = Field.constant(geometry, coeff)
            term = cls.function(coeff)
            for a in axes:
                e_a = cls(
                    geometry,
                    1,
                    {(lab,): Field.constant(geometry, q[a, lab]) for lab in range(geometry.ndim_real)},
                )
                term = wedge(term, e_a, product="scalar")
            result = term if result is None else result + term
        if result is None:
            raise BidegreeError("empty term list; use Form.zero")
        return result

    # structure ----------------------------------------------------------
    @property
    def types(self):
        return {key_type(self.geometry.d, k) for k in self.components}

    @property
    def bidegree(self):
        t = self.types
        return next(iter(t)) if len(t) == 1 else None

    def is_type(self, p, q):
        """True when every stored component has type ``(p, q)`` (vacuous for zero)."""
        return self.degree == p + q and all(t == (p, q) for t in self.types)

    def part(self, p, q):
        d = self.geometry.d
        comps = {k: v for k, v in self.components.items() if key_type(d, k) == (p, q)}
        return Form(self.geometry, self.degree, comps, self.matrix_shape)

    def coefficient(self, *names):
        labels = tuple(parse_label(self.geometry.d, n) for n in names)
        sign, key = canonical(labels)
        if sign == 0 or key not in self.components:
            return Field.zeros(self.geometry, self.matrix_shape)
        return self.components[key] * sign

    def max_norm(self):
        return max((c.max_norm() for c in self.components.values()), default=0.0)

    def map(self, fn):
        """Apply ``fn`` to every coefficient field."""
        comps = {k: fn(v) for k, v in self.components.items()}
        return Form(self.geometry, self.degree, comps, self.matrix_shape)

    # arithmetic ---------------------------------------------------------
    def _check(self, other):
        if not isinstance(other, Form):
            raise TypeError("can only combine forms with forms")
        if other.geometry != self.geometry:
            raise GeometryMismatchError("forms on different tori")
        if other.degree != self.degree:
            raise BidegreeError(f"degree mismatch: {self.degree} vs {other.degree}")

    def __add__(self, other):
        self._check(other)
        comps = dict(self.components)
        for k, v in other.components.items():
            comps[k] = comps[k] + v if k in comps else v
        shape = self.matrix_shape if self.components else other.matrix_shape
        return Form(self.geometry, self.degree, comps, shape)

    def __neg__(self):
        return self.map(lambda f: -f)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, scalar):
        if isinstance(scalar, Form):
            raise TypeError("use wedge() for products of forms")
        return self.map(lambda f: f * scalar)

    __rmul__ = __mul__

    def __repr__(self):
        names = [
            "^".join(label_name(self.geometry.d, lab) for lab in k) or "1" for k in self.components
        ]
        return f"Form(degree={self.degree}, types={sorted(self.types)}, terms={names})"

    # evaluation ---------------------------------------------------------
    def evaluate(self, *vectors):
        """Evaluate on ``degree`` vectors given by real-frame components.

        Each vector is a sequence of ``2d`` components (numbers, arrays
        broadcastable to the grid, or scalar fields) over
        ``(d/ds_1, d/dt_1, ...)``.  Returns a field.
        """
        if len(vectors) != self.degree:
            raise BidegreeError(f"{self.degree}-form evaluated on {len(vectors)} vectors")
        g = self.geometry
        p = g.real_frame_matrix()
        comps = [_vector_components(g, v) for v in vectors]
        # theta[label][j] = theta_label(V_j), grid-shaped
        theta = [[sum(p[lab, a] * c[a] for a in range(g.ndim_real)) for c in comps] for lab in range(g.ndim_real)]
        out = np.zeros(g.grid_shape + self.matrix_shape, dtype=complex)
        for key, coeff in self.components.items():
            det = np.zeros(g.grid_shape, dtype=complex)
            for perm in permutations(range(self.degree)):
                term = np.full(g.grid_shape, _perm_sign(perm), dtype=complex)
                for i, j in enumerate(perm):
                    term = term * theta[key[i]][j]
                det = det + term
            out = out + coeff.values * det[..., None, None]
        return Field(g, out)

    def to_real_frame(self):
        """Coefficients against ``dx_{a1} ^ ... ^ dx_{ak}`` (sorted real axes)."""
        g = self.geometry
        eye = np.eye(g.ndim_real)
        return {
            axes: self.evaluate(*(eye[a] for a in axes))
            for axes in combinations(range(g.ndim_real), self.degree)
        }


def _vector_components(g, v):
    if isinstance(v, Field):
        raise TypeError("vectors must be sequences of 2d components")
    out = []
    if len(v) != g.ndim_real:
        raise ValueError(f"vector needs {g.ndim_real} real-frame components")
    for c in v:
        if isinstance(c, Field):
            if not c.is_scalar:
                raise ValueError("vector components must be scalar fields")
            c = c.values[..., 0, 0]
        out.append(np.broadcast_to(np.asarray(c, dtype=complex), g.grid_shape))
    return out


def one_form(geometry, dz=(), dzbar=(), matrix_shape=None):
    """``sum_k dz[k] dz_k + sum_k dzbar[k] dzbar_k``; entries may be fields, matrices or ``None``."""
    d = geometry.d
    comps = {}
    for k, c in enumerate(dz):
        if c is not None:
            comps[(k,)] = c if isinstance(c, Field) else Field.constant(geometry, c)
    for k, c in enumerate(dzbar):
        if c is not None:
            comps[(d + k,)] = c if isinstance(c, Field) else Field.constant(geometry, c)
    return Form(geometry, 1, comps, matrix_shape or (1, 1))


def real_one_form(geometry, coeffs):
    """``sum_a coeffs[a] dx_a`` over the real frame ``(ds_1, dt_1, ...)``."""
    return Form.from_real_frame(geometry, {(a,): c for a, c in enumerate(coeffs) if c is not None})


def _apply_product(product, a, b):
    if product == "scalar":
        if a.shape[-2:] == (1, 1):
            return a * b
        if b.shape[-2:] == (1, 1):
            return a * b
        raise ValueError("scalar product needs a 1x1 factor")
    fn = _PRODUCTS[product] if isinstance(product, str) else product
    return fn(a, b)


def wedge(alpha, beta, product="matmul"):
    """Wedge product with coefficient product ``product``.

    ``product`` is ``"matmul"`` (pointwise matrix product), ``"bracket"``
    (commutator), ``"inner"`` (trace form, scalar result), ``"scalar"``
    (one factor is ``1 x 1``) or a callable on value arrays.
    """
    if alpha.geometry != beta.geometry:
        raise GeometryMismatchError("forms on different tori")
    g = alpha.geometry
    degree = alpha.degree + beta.degree
    probe = _apply_product(
        product,
        np.zeros(alpha.matrix_shape, dtype=complex),
        np.zeros(beta.matrix_shape, dtype=complex),
    )
    shape = probe.shape[-2:]
    if degree > g.ndim_real:
        return Form.zero(g, degree, shape)
    comps = {}
    for ka, ca in alpha.components.items():
        for kb, cb in beta.components.items():
            sign, key = canonical(ka + kb)
            if sign == 0:
                continue
            val = Field(g, sign * _apply_product(product, ca.values, cb.values))
            comps[key] = comps[key] + val if key in comps else val
    return Form(g, degree, comps, shape)


def _differential(alpha, holomorphic, antiholomorphic):
    g = alpha.geometry
    d = g.d
    degree = alpha.degree + 1
    if degree > g.ndim_real:
        return Form.zero(g, degree, alpha.matrix_shape)
    comps = {}
    for key, coeff in alpha.components.items():
        for k in range(d):
            for use, label, op in (
                (holomorphic, k, torus.deriv_z),
                (antiholomorphic, d + k, torus.deriv_zbar),
            ):
                if not use:
                    continue
                sign, new = canonical((label,) + key)
                if sign == 0:
                    continue
                val = op(coeff, k) * sign
                comps[new] = comps[new] + val if new in comps else val
    return Form(g, degree, comps, alpha.matrix_shape)


def partial(alpha):
    """Holomorphic differential: maps type ``(p, q)`` into ``(p + 1, q)``."""
    return _differential(alpha, True, False)


def delbar(alpha):
    """Antiholomorphic differential: maps type ``(p, q)`` into ``(p, q + 1)``."""
    return _differential(alpha, False, True)


def ext_d(alpha):
    """Exterior derivative ``d = partial + delbar``."""
    return _differential(alpha, True, True)


def form_bracket(alpha, beta):
    """``[a, b](X, Y) = [a(X), b(Y)] - [a(Y), b(X)]`` for matrix-valued 1-forms."""
    if alpha.degree != 1 or beta.degree != 1:
        raise BidegreeError("form_bracket is defined for 1-forms only")
    return wedge(alpha, beta, product="bracket")


def curvature_F(omega):
    """``F(w) = dw + 1/2 [w, w]``."""
    if omega.degree != 1:
        raise BidegreeError("curvature_F needs a 1-form")
    return ext_d(omega) + 0.5 * form_bracket(omega, omega)


def curvature_Fbar(omega):
    """``Fbar(w) = delbar w + 1/2 [w, w]`` for a ``(0, 1)``-form; the result has type ``(0, 2)``."""
    if not omega.is_type(0, 1):
        raise BidegreeError("curvature_Fbar needs a form of type (0,1)")
    return delbar(omega) + 0.5 * form_bracket(omega, omega)


def pair(f, alpha):
    """Pointwise trace pairing ``<f, alpha>`` of a field with a form (scalar form)."""
    return wedge(Form.function(f), alpha, product="inner")


def top_form_jacobian(geometry):
    """``ds_1 ^ dt_1 ^ ..``-coefficient of ``dz_1 ^ .. ^ dz_d ^ dzbar_1 ^ .. ^ dzbar_d``.

    For ``d = 1`` this is ``conj(tau) - tau = -2i Im(tau)``.
    """
    g = geometry
    top = Form(g, g.ndim_real, {tuple(range(g.ndim_real)): Field.constant(g, 1.0)})
    return complex(integrate_top(top))


def integrate_top(alpha):
    """Integral of a top-degree form over the torus (oriented by ``ds_1 ^ dt_1 ^ ..``)."""
    g = alpha.geometry
    if alpha.degree != g.ndim_real:
        raise BidegreeError(f"integrate_top needs a {g.ndim_real}-form")
    coeff = alpha.evaluate(*np.eye(g.ndim_real))
    return torus.integrate(coeff)


def is_holomorphic(alpha, tol=1e-10):
    """Type ``(p, 0)`` with ``||delbar alpha|| < tol``."""
    return alpha.is_type(alpha.degree, 0) and delbar(alpha).max_norm() < tol


# JSON ------------------------------------------------------------------

def _matrix_json(m):
    m = np.atleast_2d(m)
    return {"re": m.real.tolist(), "im": m.imag.tolist()}


def _matrix_from_json(obj):
    if isinstance(obj, dict):
        return np.asarray(obj["re"], dtype=float) + 1j * np.asarray(obj.get("im", 0.0), dtype=float)
    arr = np.asarray(obj, dtype=float)
    if arr.shape and arr.shape[-1] == 2 and arr.ndim >= 1:
        return arr[..., 0] + 1j * arr[..., 1]
    return arr.astype(complex)


def field_to_modes_json(f, cutoff=1e-14):
    """Sparse mode list ``[{"freq": [...], "re": [[..]], "im": [[..]]}, ...]``."""
    m = torus.to_modes(f)
    g = f.geometry
    out = []
    for idx in np.ndindex(*g.grid_shape):
        c = m.coeffs[idx]
        if np.abs(c).max() > cutoff:
            freq = [int(g.frequencies[i]) for i in idx]
            out.append({"freq": freq, **_matrix_json(c)})
    out.sort(key=lambda e: e["freq"])
    return out


def field_from_modes_json(geometry, modes, matrix_shape=None):
    total = None
    for entry in modes:
        freq = entry["freq"]
        if len(freq) != geometry.ndim_real:
            raise ValueError(f"mode frequency {freq} needs {geometry.ndim_real} entries")
        if max(abs(int(k)) for k in freq) > geometry.N:
            raise ValueError(f"mode frequency {freq} exceeds the band limit {geometry.N}")
        coeff = _matrix_from_json(entry) if "re" in entry else _matrix_from_json(entry["coeff"])
        term = Field.single_mode(geometry, freq, coeff)
        total = term if total is None else total + term
    if total is None:
        return Field.zeros(geometry, matrix_shape or (1, 1))
    return total


def form_to_json(alpha, cutoff=1e-14):
    g = alpha.geometry
    bideg = alpha.bidegree
    return {
        "geometry": g.to_dict(),
        "degree": alpha.degree,
        "bidegree": list(bideg) if bideg else None,
        "matrix_shape": list(alpha.matrix_shape),
        "components": [
            {
                "index": [label_name(g.d, lab) for lab in key],
                "modes": field_to_modes_json(coeff, cutoff),
            }
            for key, coeff in sorted(alpha.components.items())
        ],
    }


def form_from_json(obj, geometry=None):
    if geometry is None:
        geometry = TorusGeometry.from_dict(obj["geometry"])
    shape = tuple(obj.get("matrix_shape", (1, 1)))
    degree = int(obj["degree"])
    comps = {}
    for comp in obj.get("components", []):
        labels = tuple(parse_label(geometry.d, n) for n in comp["index"])
        if len(labels) != degree:
            raise BidegreeError(f"component {comp['index']} does not have degree {degree}")
        sign, key = canonical(labels)
        if sign == 0:
            continue
        coeff = field_from_modes_json(geometry, comp["modes"], shape) * sign
        comps[key] = comps[key] + coeff if key in comps else coeff
    form = Form(geometry, degree, comps, shape)
    bideg = obj.get("bidegree")
    if bideg is not None and not form.is_type(*bideg):
        raise BidegreeError(f"components are not all of type {tuple(bideg)}")
    return form
