"""Lie algebras and associative algebras given by structure constants."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Mapping, Sequence

import numpy as np

from . import linalg as la


class LieAlgebraError(ValueError):
    pass


class JacobiError(LieAlgebraError):
    pass


class AssociativityError(ValueError):
    pass


@dataclass(frozen=True)
class JacobiReport:
    ok: bool
    worst_violation: float
    witness_triple: tuple[int, int, int] | None


def _check_vector(v: np.ndarray, n: int, what: str = "vector") -> None:
    if v.shape != (n,):
        raise LieAlgebraError(f"{what} has shape {v.shape}, expected ({n},)")


@dataclass(frozen=True, eq=False)
class LieAlgebra:
    """Real Lie algebra with ``[e_i, e_j] = sum_k c[i, j, k] e_k``.

    Use :meth:`from_constants` or :meth:`from_brackets`; both enforce
    antisymmetry.  Jacobi is *not* enforced here (see :func:`check_jacobi`)
    so that broken inputs can still be diagnosed.
    """

    c: np.ndarray
    labels: tuple[str, ...] = ()
    dual_labels: tuple[str, ...] = ()

    def __post_init__(self):
        n = self.c.shape[0]
        if self.c.shape != (n, n, n) or n < 1:
            raise LieAlgebraError(f"structure constants must be n x n x n, got {self.c.shape}")
        if self.labels and len(self.labels) != n:
            raise LieAlgebraError("wrong number of labels")
        if self.dual_labels and len(self.dual_labels) != n:
            raise LieAlgebraError("wrong number of dual labels")

    @property
    def dim(self) -> int:
        return self.c.shape[0]

    @property
    def exact(self) -> bool:
        return la.is_exact(self.c)

    @classmethod
    def from_constants(cls, c, labels: Sequence[str] = (), dual_labels: Sequence[str] = (),
                       exact: bool = True) -> "LieAlgebra":
        arr = la.as_array(c, exact)
        n = arr.shape[0]
        if arr.shape != (n, n, n):
            raise LieAlgebraError(f"structure constants must be n x n x n, got {arr.shape}")
        tol = 0.0 if exact else 1e-12
        for i in range(n):
            if la.max_abs(arr[i, i]) > tol:
                raise LieAlgebraError(f"[e{i},e{i}] must vanish")
            for j in range(i + 1, n):
                a, b = arr[i, j], arr[j, i]
                if la.max_abs(a + b) <= tol:
                    continue
                # one-sided input is completed; two-sided input must agree
                if la.max_abs(b) == 0:
                    arr[j, i] = -a
                elif la.max_abs(a) == 0:
                    arr[i, j] = -b
                else:
                    raise LieAlgebraError(f"inconsistent brackets [e{i},e{j}] and [e{j},e{i}]")
        return cls(la.frozen(arr), tuple(labels), tuple(dual_labels))

    @classmethod
    def from_brackets(cls, dim: int, brackets: Mapping[tuple[int, int], Mapping[int, object]],
                      labels: Sequence[str] = (), dual_labels: Sequence[str] = (),
                      exact: bool = True) -> "LieAlgebra":
        """Build from sparse data ``{(i, j): {k: coeff}}``; missing entries are zero."""
        c = la.zeros((dim, dim, dim), exact)
        seen: dict[tuple[int, int], np.ndarray] = {}
        for (i, j), image in brackets.items():
            if not (0 <= i < dim and 0 <= j < dim):
                raise LieAlgebraError(f"bracket index out of range: ({i}, {j})")
            if i == j:
                if any(la.parse_scalar(v) != 0 for v in image.values()):
                    raise LieAlgebraError(f"[e{i},e{i}] must vanish")
                continue
            vec = la.zeros(dim, exact)
            for k, v in image.items():
                s = la.parse_scalar(v)
                vec[k] = s if exact else float(s)
            key = (min(i, j), max(i, j))
            signed = vec if i < j else -vec
            if key in seen:
                if not la.is_zero(seen[key] - signed, 1e-12):
                    raise LieAlgebraError(f"inconsistent brackets for pair {key}")
                continue
            seen[key] = signed
            c[key[0], key[1]] = signed
            c[key[1], key[0]] = -signed
        return cls(la.frozen(c), tuple(labels), tuple(dual_labels))

    def to_float(self) -> "LieAlgebra":
        return LieAlgebra(la.frozen(la.to_float(self.c)), self.labels, self.dual_labels)

    def label(self, i: int) -> str:
        return self.labels[i] if self.labels else f"e{i}"

    def dual_label(self, i: int) -> str:
        if self.dual_labels:
            return self.dual_labels[i]
        return self.labels[i].lower() if self.labels else f"e^{i}"

    def basis_vector(self, i: int) -> np.ndarray:
        v = la.zeros(self.dim, self.exact)
        v[i] = Fraction(1) if self.exact else 1.0
        return v

    def vector(self, data) -> np.ndarray:
        v = la.as_array(data, self.exact)
        _check_vector(v, self.dim)
        return v

    def __eq__(self, other):
        if not isinstance(other, LieAlgebra):
            return NotImplemented
        return (self.dim == other.dim and self.exact == other.exact
                and bool(np.all(self.c == other.c)) and self.labels == other.labels)

    __hash__ = None

    @cached_property
    def ad_matrices(self) -> np.ndarray:
        """``ad_matrices[i][k, j]`` is the e_k component of ``[e_i, e_j]``."""
        return la.frozen(np.transpose(self.c, (0, 2, 1)))

    @cached_property
    def nonzero_constants(self) -> tuple[tuple[int, int, int, object], ...]:
        """``(i, j, k, c_ij^k)`` for every nonzero constant; speeds up exact brackets."""
        idx = np.argwhere(self.c != 0)
        return tuple((int(i), int(j), int(k), self.c[i, j, k]) for i, j, k in idx)


def bracket(g: LieAlgebra, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    _check_vector(x, g.dim, "x")
    _check_vector(y, g.dim, "y")
    la.same_backend(g.c, x, y)
    if not g.exact:
        return np.tensordot(np.tensordot(x, g.c, axes=(0, 0)), y, axes=(0, 0))
    out = la.zeros(g.dim, True)
    for i, j, k, v in g.nonzero_constants:
        if x[i] and y[j]:
            out[k] += x[i] * y[j] * v
    return out


def ad(g: LieAlgebra, x: np.ndarray) -> np.ndarray:
    """Matrix of ``y -> [x, y]``; column j is ``[x, e_j]``."""
    _check_vector(x, g.dim, "x")
    la.same_backend(g.c, x)
    if not g.exact:
        return np.tensordot(x, g.ad_matrices, axes=(0, 0))
    out = la.zeros((g.dim, g.dim), True)
    for i, j, k, v in g.nonzero_constants:
        if x[i]:
            out[k, j] += x[i] * v
    return out


def check_jacobi(g: LieAlgebra, tol: float = 1e-10) -> JacobiReport:
    n = g.dim
    worst, witness = 0.0, None
    c = g.c
    for i in range(n):
        for j in range(i + 1, n):
            for l in range(j + 1, n):
                # [[e_i,e_j],e_l] + [[e_j,e_l],e_i] + [[e_l,e_i],e_j]
                r = c[i, j] @ c[:, l] + c[j, l] @ c[:, i] + c[l, i] @ c[:, j]
                v = la.max_abs(r)
                if v > worst:
                    worst, witness = v, (i, j, l)
    ok = worst == 0 if g.exact else worst <= tol
    return JacobiReport(ok, worst, None if ok else witness)


def ad_traces(g: LieAlgebra) -> np.ndarray:
    """``tr(ad e_i)`` for every basis vector."""
    return np.array([np.trace(g.ad_matrices[i]) for i in range(g.dim)], dtype=g.c.dtype)


def is_unimodular(g: LieAlgebra, tol: float = 1e-10) -> tuple[bool, np.ndarray]:
    traces = ad_traces(g)
    return la.is_zero(traces, tol), traces


def derived_algebra(g: LieAlgebra) -> np.ndarray:
    n = g.dim
    images = g.c.reshape(n * n, n).T
    return la.column_basis(images)


def center(g: LieAlgebra) -> np.ndarray:
    # x is central iff sum_i x_i c[i, j, k] = 0 for all j, k
    n = g.dim
    return la.nullspace(g.c.reshape(n, n * n).T)


def bracket_span(g: LieAlgebra, u: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Basis of ``[span u, span w]``."""
    vecs = [bracket(g, u[:, a], w[:, b]) for a in range(u.shape[1]) for b in range(w.shape[1])]
    if not vecs:
        return la.zeros((g.dim, 0), g.exact)
    return la.column_basis(np.column_stack(vecs))


def lower_central_series(g: LieAlgebra) -> list[np.ndarray]:
    """g ⊇ [g,g] ⊇ [g,[g,g]] ⊇ ... until it stabilises."""
    full = la.eye(g.dim, g.exact)
    series = [full]
    while True:
        nxt = bracket_span(g, full, series[-1])
        if nxt.shape[1] == series[-1].shape[1]:
            return series
        series.append(nxt)
        if nxt.shape[1] == 0:
            return series


def is_nilpotent(g: LieAlgebra) -> bool:
    return lower_central_series(g)[-1].shape[1] == 0


def is_subalgebra(g: LieAlgebra, sub: np.ndarray) -> bool:
    return la.contains(sub, bracket_span(g, sub, sub))


def is_ideal(g: LieAlgebra, sub: np.ndarray) -> bool:
    return la.contains(sub, bracket_span(g, la.eye(g.dim, g.exact), sub))


def change_basis(g: LieAlgebra, p: np.ndarray, labels: Sequence[str] = ()) -> LieAlgebra:
    """Structure constants in the basis given by the columns of ``p``."""
    pinv = la.inverse(p)
    n = g.dim
    c = la.zeros((n, n, n), g.exact)
    for a in range(n):
        for b in range(n):
            c[a, b] = pinv @ bracket(g, p[:, a], p[:, b])
    return LieAlgebra.from_constants(c, labels, exact=g.exact)


# -- associative algebras ------------------------------------------------------

@dataclass(frozen=True, eq=False)
class AssociativeAlgebra:
    """Finite-dimensional real associative algebra, ``e_i e_j = sum_k a[i, j, k] e_k``."""

    a: np.ndarray
    name: str = ""

    @classmethod
    def from_products(cls, dim: int, products: Mapping[tuple[int, int], Mapping[int, object]],
                      name: str = "") -> "AssociativeAlgebra":
        a = la.zeros((dim, dim, dim), True)
        for (i, j), image in products.items():
            for k, v in image.items():
                a[i, j, k] = la.parse_scalar(v)
        return cls(la.frozen(a), name)

    @property
    def dim(self) -> int:
        return self.a.shape[0]

    @property
    def exact(self) -> bool:
        return la.is_exact(self.a)

    @property
    def commutative(self) -> bool:
        return bool(np.all(self.a == np.transpose(self.a, (1, 0, 2))))

    def multiply(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        return la.tensordot(la.tensordot(x, self.a, axes=(0, 0)), y, axes=(0, 0))

    def left_mult(self, x: np.ndarray) -> np.ndarray:
        """Matrix of ``y -> x y``."""
        return la.tensordot(x, self.a, axes=(0, 0)).T

    def associativity_defect(self) -> float:
        a = self.a
        # (e_i e_j) e_l - e_i (e_j e_l)
        lhs = la.tensordot(a, a, axes=(2, 0))            # [i, j, l, m]
        rhs = la.tensordot(a, a, axes=(1, 2)).transpose(0, 2, 3, 1)  # a[i,k,m] a[j,l,k] -> [i,j,l,m]
        return la.max_abs(lhs - rhs)

    def is_associative(self) -> bool:
        return self.associativity_defect() == 0 if self.exact else self.associativity_defect() < 1e-12


def aff_construct(alg: AssociativeAlgebra) -> tuple[LieAlgebra, np.ndarray]:
    """``aff(A) = A ⊕ A`` with ``[(a,b),(a',b')] = (aa'-a'a, ab'-a'b)`` and ``J(a,b) = (b,-a)``.

    Basis: ``(e_i, 0)`` is index ``i`` and ``(0, e_i)`` is index ``m + i``.
    """
    if not alg.is_associative():
        raise AssociativityError(f"algebra {alg.name or ''} is not associative")
    m = alg.dim
    n = 2 * m
    exact = alg.exact
    c = la.zeros((n, n, n), exact)
    a = alg.a
    for i in range(m):
        for j in range(m):
            c[i, j, :m] = a[i, j] - a[j, i]
            c[i, m + j, m:] = a[i, j]
            c[m + j, i, m:] = -a[i, j]
    labels = tuple(f"a{i}" for i in range(m)) + tuple(f"b{i}" for i in range(m))
    g = LieAlgebra.from_constants(c, labels, exact=exact)
    j_std = la.zeros((n, n), exact)
    one = Fraction(1) if exact else 1.0
    for i in range(m):
        j_std[m + i, i] = -one   # J(e_i, 0) = (0, -e_i)
        j_std[i, m + i] = one    # J(0, e_i) = (e_i, 0)
    return g, la.frozen(j_std)


def ideal_powers(alg: AssociativeAlgebra) -> list[np.ndarray]:
    """A ⊇ A^2 ⊇ A^3 ⊇ ... (bases as columns), stopping at 0 or stabilisation."""
    full = la.eye(alg.dim, alg.exact)
    chain = [full]
    while True:
        prev = chain[-1]
        prods = [alg.multiply(prev[:, p], full[:, q])
                 for p in range(prev.shape[1]) for q in range(alg.dim)]
        nxt = la.column_basis(np.column_stack(prods)) if prods else prev[:, :0]
        if nxt.shape[1] == prev.shape[1]:
            return chain
        chain.append(nxt)
        if nxt.shape[1] == 0:
            return chain


def assoc_is_nilpotent(alg: AssociativeAlgebra) -> tuple[bool, int | None]:
    """Whether some power ``A^k`` vanishes, and the first such ``k``."""
    chain = ideal_powers(alg)
    if chain[-1].shape[1] == 0:
        return True, len(chain)
    return False, None


def find_idempotent(alg: AssociativeAlgebra) -> np.ndarray | None:
    """A nonzero ``e`` with ``e^2 = e``, or None when the algebra is nilpotent.

    Takes a non-nilpotent basis element x and returns the unit of the
    ideal ``x^n A`` (commutative case), found by solving ``e b = b`` on a
    basis of that ideal.
    """
    n = alg.dim
    for i in range(n):
        x = la.zeros(n, alg.exact)
        x[i] = Fraction(1)
        lx = alg.left_mult(x)
        power = np.linalg.matrix_power(lx, n) if not alg.exact else _mat_power(lx, n)
        if la.is_zero(power):
            continue
        ideal = la.column_basis(power)
        k = ideal.shape[1]
        # unknown e = ideal @ t; equations: e * b_j = b_j for each basis b_j
        rows, rhs = [], []
        for j in range(k):
            bj = ideal[:, j]
            rows.append(np.column_stack([alg.multiply(ideal[:, s], bj) for s in range(k)]))
            rhs.append(bj)
        system = np.concatenate(rows, axis=0)
        target = np.concatenate(rhs)
        aug = np.column_stack([system, target])
        red, piv = la.rref(aug)
        if k in piv:
            continue
        t = la.zeros(k, True)
        for r, p in enumerate(piv):
            t[p] = red[r, k]
        e = ideal @ t
        if not la.is_zero(e) and la.is_zero(alg.multiply(e, e) - e):
            return e
    return None


def _mat_power(m: np.ndarray, k: int) -> np.ndarray:
    out = la.eye(m.shape[0], True)
    for _ in range(k):
        out = out @ m
    return out
