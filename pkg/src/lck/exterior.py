"""Alternating forms on a Lie algebra: wedge, Chevalley-Eilenberg d, Hodge star, Lee form.

A k-form on an n-dimensional algebra is stored as a dense coefficient
vector indexed by the strictly increasing k-tuples in lexicographic
order, with ``e^{i1}∧...∧e^{ik}(e_{i1},...,e_{ik}) = 1``.

Sign conventions:

* ``(α∧β)`` is the determinant (shuffle) product, so ``(x∧y)(X, Y) = 1``.
* ``dα(X_0..X_k) = Σ_{i<j} (-1)^{i+j} α([X_i, X_j], X_0, ..^i..^j.., X_k)``,
  giving ``dθ(X, Y) = -θ([X, Y])`` on 1-forms.
* ``β ∧ *α = <β, α> vol`` with the Gram-determinant inner product on forms.
* ``δ = (-1)^{n(k+1)+1} * d *`` on k-forms, i.e. ``δ = -*d*`` in even dimension.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb

import numpy as np

from . import linalg as la
from .lie import LieAlgebra


class FormError(ValueError):
    pass


class MetricError(ValueError):
    pass


# -- index tables ----------------------------------------------------------------

@lru_cache(maxsize=None)
def combos(n: int, k: int) -> tuple[tuple[int, ...], ...]:
    return tuple(itertools.combinations(range(n), k))


@lru_cache(maxsize=None)
def combo_index(n: int, k: int) -> dict[tuple[int, ...], int]:
    return {t: i for i, t in enumerate(combos(n, k))}


def perm_sign(seq) -> int:
    s = 1
    seq = list(seq)
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                s = -s
            elif seq[i] == seq[j]:
                return 0
    return s


@lru_cache(maxsize=None)
def wedge_table(n: int, k1: int, k2: int) -> np.ndarray:
    """Integer tensor T with ``(α∧β)_K = Σ T[K, I, J] α_I β_J``."""
    out_index = combo_index(n, k1 + k2)
    t = np.zeros((comb(n, k1 + k2), comb(n, k1), comb(n, k2)), dtype=np.int64)
    for a, i in enumerate(combos(n, k1)):
        si = set(i)
        for b, j in enumerate(combos(n, k2)):
            if si.intersection(j):
                continue
            cat = i + j
            t[out_index[tuple(sorted(cat))], a, b] = perm_sign(cat)
    t.flags.writeable = False
    return t


@lru_cache(maxsize=None)
def complement_table(n: int, k: int) -> np.ndarray:
    """``P[L^c, L] = sign(L, L^c)``: maps k-tuples to their complements."""
    p = np.zeros((comb(n, n - k), comb(n, k)), dtype=np.int64)
    cidx = combo_index(n, n - k)
    full = set(range(n))
    for a, l in enumerate(combos(n, k)):
        lc = tuple(sorted(full.difference(l)))
        p[cidx[lc], a] = perm_sign(l + lc)
    p.flags.writeable = False
    return p


def _as_backend(m: np.ndarray, exact: bool) -> np.ndarray:
    """Integer tables promoted to the requested backend."""
    if exact:
        return np.vectorize(Fraction, otypes=[object])(m) if m.size else m.astype(object)
    return m.astype(float)


# -- forms -----------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class AlternatingForm:
    dim: int
    degree: int
    coeffs: np.ndarray

    def __post_init__(self):
        if not 0 <= self.degree <= self.dim:
            raise FormError(f"degree {self.degree} out of range for dim {self.dim}")
        if self.coeffs.shape != (comb(self.dim, self.degree),):
            raise FormError("coefficient vector has the wrong length")
        if self.coeffs.flags.writeable:
            object.__setattr__(self, "coeffs", la.frozen(self.coeffs))

    # construction
    @classmethod
    def zero(cls, dim: int, degree: int, exact: bool = True) -> "AlternatingForm":
        return cls(dim, degree, la.zeros(comb(dim, degree), exact))

    @classmethod
    def from_dict(cls, dim: int, degree: int, terms: dict, exact: bool = True) -> "AlternatingForm":
        """Terms keyed by index tuples in any order; signs follow the permutation."""
        c = la.zeros(comb(dim, degree), exact)
        idx = combo_index(dim, degree)
        for key, v in terms.items():
            key = (key,) if isinstance(key, int) else tuple(key)
            if len(key) != degree:
                raise FormError(f"term {key} does not have degree {degree}")
            s = perm_sign(key)
            if s == 0:
                continue
            val = la.parse_scalar(v)
            c[idx[tuple(sorted(key))]] += s * (val if exact else float(val))
        return cls(dim, degree, c)

    @classmethod
    def basis(cls, dim: int, indices, exact: bool = True) -> "AlternatingForm":
        indices = (indices,) if isinstance(indices, int) else tuple(indices)
        return cls.from_dict(dim, len(indices), {indices: 1}, exact)

    @classmethod
    def from_covector(cls, v: np.ndarray) -> "AlternatingForm":
        return cls(len(v), 1, np.array(v, copy=True))

    @property
    def exact(self) -> bool:
        return la.is_exact(self.coeffs)

    def to_float(self) -> "AlternatingForm":
        return AlternatingForm(self.dim, self.degree, la.to_float(self.coeffs))

    def terms(self) -> dict[tuple[int, ...], object]:
        return {t: v for t, v in zip(combos(self.dim, self.degree), self.coeffs) if v != 0}

    def __getitem__(self, key) -> object:
        key = (key,) if isinstance(key, int) else tuple(key)
        s = perm_sign(key)
        if s == 0:
            return Fraction(0) if self.exact else 0.0
        return s * self.coeffs[combo_index(self.dim, self.degree)[tuple(sorted(key))]]

    def __call__(self, *vectors: np.ndarray):
        """Evaluate on k vectors: ``Σ_I α_I det(V[I, :])``."""
        if len(vectors) != self.degree:
            raise FormError(f"{self.degree}-form evaluated on {len(vectors)} vectors")
        if self.degree == 0:
            return self.coeffs[0]
        v = np.column_stack(vectors)
        la.same_backend(self.coeffs, v)
        minors = la.compound(v, combos(self.dim, self.degree), [tuple(range(self.degree))])
        return (self.coeffs @ minors)[0]

    def _check(self, other: "AlternatingForm") -> None:
        if (self.dim, self.degree) != (other.dim, other.degree):
            raise FormError("forms live in different spaces")

    def __add__(self, other: "AlternatingForm") -> "AlternatingForm":
        self._check(other)
        return AlternatingForm(self.dim, self.degree, self.coeffs + other.coeffs)

    def __sub__(self, other: "AlternatingForm") -> "AlternatingForm":
        self._check(other)
        return AlternatingForm(self.dim, self.degree, self.coeffs - other.coeffs)

    def __neg__(self) -> "AlternatingForm":
        return AlternatingForm(self.dim, self.degree, -self.coeffs)

    def __mul__(self, s) -> "AlternatingForm":
        return AlternatingForm(self.dim, self.degree, self.coeffs * s)

    __rmul__ = __mul__

    def __xor__(self, other: "AlternatingForm") -> "AlternatingForm":
        return wedge(self, other)

    def __eq__(self, other):
        if not isinstance(other, AlternatingForm):
            return NotImplemented
        return (self.dim, self.degree) == (other.dim, other.degree) and bool(
            np.all(self.coeffs == other.coeffs))

    __hash__ = None

    def is_zero(self, tol: float = la.FLOAT_TOL) -> bool:
        return la.is_zero(self.coeffs, tol)

    def close_to(self, other: "AlternatingForm", tol: float = la.FLOAT_TOL) -> bool:
        self._check(other)
        if self.exact and other.exact:
            return self == other
        return la.max_abs(la.to_float(self.coeffs) - la.to_float(other.coeffs)) <= tol

    def compose(self, m: np.ndarray) -> "AlternatingForm":
        """Pull back along the linear map m (1-forms only): ``X -> α(mX)``."""
        if self.degree != 1:
            raise FormError("compose is defined for 1-forms")
        return AlternatingForm(self.dim, 1, m.T @ self.coeffs)

    def format(self, dual_labels=None) -> str:
        labels = dual_labels or [f"e^{i}" for i in range(self.dim)]
        parts = []
        for t, v in self.terms().items():
            name = "^".join(labels[i] for i in t) if t else "1"
            mag = abs(v)
            if not self.exact:
                if mag < la.FLOAT_TOL:
                    continue
                coef = f"{mag:.12g}"
            else:
                coef = str(mag)
            body = name if coef == "1" else f"{coef}*{name}"
            parts.append(("-" if v < 0 else "+", body))
        if not parts:
            return "0"
        out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out


def wedge(a: AlternatingForm, b: AlternatingForm) -> AlternatingForm:
    if a.dim != b.dim:
        raise FormError("forms on different algebras")
    k = a.degree + b.degree
    if k > a.dim:
        raise FormError(f"degree overflow: {a.degree} + {b.degree} > {a.dim}")
    la.same_backend(a.coeffs, b.coeffs)
    t = _as_backend(wedge_table(a.dim, a.degree, b.degree), a.exact)
    rows, ka, kb = t.shape
    tb = la.matmul(t.reshape(rows * ka, kb), b.coeffs).reshape(rows, ka)
    return AlternatingForm(a.dim, k, la.matmul(tb, a.coeffs))


def wedge_matrix(omega: AlternatingForm, k: int) -> np.ndarray:
    """Matrix of the linear map ``α -> α ∧ ω`` on k-forms."""
    t = _as_backend(wedge_table(omega.dim, k, omega.degree), omega.exact)
    rows, ka, kb = t.shape
    return la.matmul(t.reshape(rows * ka, kb), omega.coeffs).reshape(rows, ka)


# -- Chevalley-Eilenberg differential -------------------------------------------------

def _build_d_matrix(g: LieAlgebra, k: int) -> np.ndarray:
    n = g.dim
    rows = combos(n, k + 1)
    cols = combo_index(n, k)
    d = la.zeros((len(rows), len(combos(n, k))), g.exact)
    c = g.c
    for r, tup in enumerate(rows):
        for a in range(k + 1):
            for b in range(a + 1, k + 1):
                sgn = -1 if (a + b) % 2 else 1
                rest = tup[:a] + tup[a + 1:b] + tup[b + 1:]
                for m in range(n):
                    coef = c[tup[a], tup[b], m]
                    if coef == 0 or m in rest:
                        continue
                    # α(e_m, rest) = (-1)^pos α(sorted)
                    pos = sum(1 for x in rest if x < m)
                    key = tuple(sorted(rest + (m,)))
                    s = sgn * (-1 if pos % 2 else 1)
                    d[r, cols[key]] += s * coef
    return la.frozen(d)


class _DCache:
    """Per-algebra memo of differential matrices (algebras are immutable)."""

    def __init__(self, g: LieAlgebra):
        self._g = g
        self._mats: dict[int, np.ndarray] = {}

    def __getitem__(self, k: int) -> np.ndarray:
        m = self._mats.get(k)
        if m is None:
            m = self._mats[k] = _build_d_matrix(self._g, k)
        return m


def d_matrix(g: LieAlgebra, k: int) -> np.ndarray:
    """Matrix of d from k-forms to (k+1)-forms."""
    cache = g.__dict__.get("_d_cache")
    if cache is None:
        cache = _DCache(g)
        object.__setattr__(g, "_d_cache", cache)
    return cache[k]


def ce_differential(g: LieAlgebra, alpha: AlternatingForm) -> AlternatingForm:
    if alpha.dim != g.dim:
        raise FormError("form and algebra dimensions differ")
    if alpha.degree >= g.dim:
        raise FormError("d of a top-degree form leaves the exterior algebra")
    la.same_backend(g.c, alpha.coeffs)
    return AlternatingForm(g.dim, alpha.degree + 1, la.matmul(d_matrix(g, alpha.degree), alpha.coeffs))


# -- metrics ----------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class InnerProduct:
    gmat: np.ndarray
    _memo: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        g = self.gmat
        n = g.shape[0]
        if g.shape != (n, n):
            raise MetricError("metric must be square")
        tol = 0.0 if la.is_exact(g) else 1e-12
        if la.max_abs(g - g.T) > tol:
            raise MetricError("metric is not symmetric")
        if not la.is_positive_definite(g):
            raise MetricError("metric is not positive definite")
        if g.flags.writeable:
            object.__setattr__(self, "gmat", la.frozen(g))

    @classmethod
    def from_matrix(cls, data, exact: bool = True) -> "InnerProduct":
        return cls(la.as_array(data, exact))

    @classmethod
    def identity(cls, n: int, exact: bool = True) -> "InnerProduct":
        return cls(la.eye(n, exact))

    @property
    def dim(self) -> int:
        return self.gmat.shape[0]

    @property
    def exact(self) -> bool:
        return la.is_exact(self.gmat)

    def to_float(self) -> "InnerProduct":
        return InnerProduct(la.to_float(self.gmat))

    def scaled(self, s) -> "InnerProduct":
        return InnerProduct(self.gmat * s)

    def __eq__(self, other):
        if not isinstance(other, InnerProduct):
            return NotImplemented
        return self.gmat.shape == other.gmat.shape and bool(np.all(self.gmat == other.gmat))

    __hash__ = None

    def _cached(self, key, fn):
        if key not in self._memo:
            self._memo[key] = fn()
        return self._memo[key]

    @property
    def inverse(self) -> np.ndarray:
        return self._cached("inv", lambda: la.inverse(self.gmat))

    @property
    def det(self):
        return self._cached("det", lambda: la.det(self.gmat))

    def inner(self, x: np.ndarray, y: np.ndarray):
        return x @ self.gmat @ y

    def norm_sq(self, x: np.ndarray):
        return x @ self.gmat @ x

    def form_gram(self, k: int) -> np.ndarray:
        """``<e^I, e^J> = det(g^{-1}[I, J])`` on k-forms."""
        def build():
            cs = combos(self.dim, k)
            return la.compound(self.inverse, cs, cs)
        return self._cached(("gram", k), build)

    def star_unscaled(self, k: int) -> np.ndarray:
        """``* = orientation * sqrt(det g) * star_unscaled(k)`` on k-forms."""
        def build():
            p = _as_backend(complement_table(self.dim, k), self.exact)
            return la.matmul(p, self.form_gram(k))
        return self._cached(("star", k), build)


def form_inner(a: AlternatingForm, b: AlternatingForm, gm: InnerProduct):
    a._check(b)
    return la.matmul(la.matmul(a.coeffs, gm.form_gram(a.degree)), b.coeffs)


def form_norm_sq(a: AlternatingForm, gm: InnerProduct):
    return form_inner(a, a, gm)


def volume_form(gm: InnerProduct, orientation: int = 1) -> AlternatingForm:
    _check_orientation(orientation)
    return hodge_star(AlternatingForm(gm.dim, 0, la.as_array([1], gm.exact)), gm, orientation)


def _check_orientation(o: int) -> None:
    if o not in (1, -1):
        raise ValueError(f"orientation must be +1 or -1, got {o!r}")


def hodge_star(alpha: AlternatingForm, gm: InnerProduct, orientation: int = 1) -> AlternatingForm:
    """Hodge star for the metric ``gm`` and the given orientation.

    On the exact backend the result stays exact when ``det g`` is a
    rational square; otherwise the volume factor is irrational and the
    result is returned on the float backend.
    """
    _check_orientation(orientation)
    if alpha.dim != gm.dim:
        raise FormError("form and metric dimensions differ")
    la.same_backend(alpha.coeffs, gm.gmat)
    body = la.matmul(gm.star_unscaled(alpha.degree), alpha.coeffs)
    if alpha.exact:
        root = la.exact_sqrt(gm.det)
        if root is not None:
            return AlternatingForm(alpha.dim, alpha.dim - alpha.degree, body * (orientation * root))
        body = la.to_float(body)
        return AlternatingForm(alpha.dim, alpha.dim - alpha.degree,
                               body * (orientation * float(gm.det) ** 0.5))
    return AlternatingForm(alpha.dim, alpha.dim - alpha.degree,
                           body * (orientation * gm.det ** 0.5))


def codifferential(g: LieAlgebra, gm: InnerProduct, alpha: AlternatingForm,
                   orientation: int = 1) -> AlternatingForm:
    """``δα = (-1)^{n(k+1)+1} * d * α`` (so ``-*d*`` in even dimension).

    The two volume factors combine into ``det g``, so the exact backend
    stays exact for every rational metric.  The orientation cancels.
    """
    _check_orientation(orientation)
    n, k = g.dim, alpha.degree
    if k == 0:
        raise FormError("codifferential of a 0-form is not defined")
    la.same_backend(g.c, gm.gmat, alpha.coeffs)
    sign = -1 if (n * (k + 1)) % 2 == 0 else 1
    inner = la.matmul(gm.star_unscaled(k), alpha.coeffs)
    inner = la.matmul(d_matrix(g, n - k), inner)
    out = la.matmul(gm.star_unscaled(n - k + 1), inner)
    return AlternatingForm(n, k - 1, out * (sign * gm.det))


# -- Hermitian data ---------------------------------------------------------------------

def is_compatible(j: np.ndarray, gm: InnerProduct, tol: float = la.FLOAT_TOL) -> bool:
    """``<JX, JY> = <X, Y>``."""
    return la.is_zero(j.T @ gm.gmat @ j - gm.gmat, tol)


def fundamental_form(j: np.ndarray, gm: InnerProduct) -> AlternatingForm:
    """``ω(X, Y) = <JX, Y>``; entries of ``J^T g`` above the diagonal."""
    la.same_backend(j, gm.gmat)
    om = j.T @ gm.gmat
    n = gm.dim
    return AlternatingForm(n, 2, np.array([om[a, b] for a, b in combos(n, 2)],
                                          dtype=object if gm.exact else float))


def lee_form(g: LieAlgebra, gm: InnerProduct, j: np.ndarray) -> AlternatingForm:
    """``θ = -1/(m-1) (δω)∘J`` where ``m = dim/2`` is the complex dimension."""
    n = g.dim
    if n % 2 or n < 4:
        raise FormError(f"Lee form needs even dimension >= 4, got {n}")
    if not is_compatible(j, gm):
        raise FormError("J is not compatible with the metric")
    m = n // 2
    omega = fundamental_form(j, gm)
    dw = codifferential(g, gm, omega)
    scale = Fraction(-1, m - 1) if gm.exact else -1.0 / (m - 1)
    return dw.compose(j) * scale
