"""Dual-backend dense linear algebra.

Every array in the package is a numpy array of one of two kinds:

* exact: ``dtype=object`` holding :class:`fractions.Fraction` entries,
* float: ``dtype=float64``.

The helpers here never mix the two. Exact paths use plain Gaussian
elimination with first-nonzero pivoting; float paths lean on numpy's
LAPACK wrappers.  Subspaces are passed around as ``n x k`` matrices whose
columns form a basis (``k == 0`` is the zero subspace).
"""

from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Sequence

import numpy as np

FLOAT_TOL = 1e-10
MEMBERSHIP_TOL = 1e-9


class BackendError(TypeError):
    """Raised when exact and float data meet in one computation."""


# -- scalars ---------------------------------------------------------------

def parse_scalar(value) -> Fraction | float:
    """Parse ``value`` into an exact Fraction or a float.

    Integers, Fractions and strings of the form ``"p"`` or ``"p/q"`` are
    exact; Python floats and decimal strings (``"0.5"``, ``"1e-3"``) are
    float.
    """
    if isinstance(value, bool):
        raise ValueError(f"not a scalar: {value!r}")
    if isinstance(value, Rational):
        return Fraction(value)
    if isinstance(value, float):
        return float(value)
    if isinstance(value, str):
        s = value.strip()
        if not s:
            raise ValueError("empty scalar string")
        if any(ch in s for ch in ".eE") and "/" not in s:
            return float(s)
        return Fraction(s)
    raise ValueError(f"not a scalar: {value!r}")


def format_scalar(x) -> str:
    if isinstance(x, Fraction):
        return str(x)
    return repr(float(x))


def exact_sqrt(x: Fraction) -> Fraction | None:
    """Square root of a nonnegative Fraction when it is rational."""
    if x < 0:
        return None
    p, q = x.numerator, x.denominator
    rp, rq = math.isqrt(p), math.isqrt(q)
    if rp * rp == p and rq * rq == q:
        return Fraction(rp, rq)
    return None


# -- arrays ----------------------------------------------------------------

def is_exact(a: np.ndarray) -> bool:
    return a.dtype == object


def exact_array(data) -> np.ndarray:
    a = np.array(data, dtype=object)
    flat = a.reshape(-1)
    for i, v in enumerate(flat):
        s = parse_scalar(v)
        if isinstance(s, float):
            raise BackendError(f"float entry {v!r} in exact array")
        flat[i] = s
    return a


def float_array(data) -> np.ndarray:
    a = np.array(data, dtype=object) if not isinstance(data, np.ndarray) else data
    if a.dtype == object:
        return np.array([float(v) for v in a.reshape(-1)], dtype=float).reshape(a.shape)
    return a.astype(float)


def as_array(data, exact: bool) -> np.ndarray:
    return exact_array(data) if exact else float_array(data)


def to_float(a: np.ndarray) -> np.ndarray:
    return float_array(a)


def zeros(shape, exact: bool) -> np.ndarray:
    if exact:
        a = np.empty(shape, dtype=object)
        a.fill(Fraction(0))
        return a
    return np.zeros(shape)


def eye(n: int, exact: bool) -> np.ndarray:
    a = zeros((n, n), exact)
    for i in range(n):
        a[i, i] = Fraction(1) if exact else 1.0
    return a


def frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.flags.writeable = False
    return a


def matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """``a @ b``; on exact input zero entries are skipped.

    Fraction arithmetic dominates the exact backend and the exterior-algebra
    matrices are mostly zero, so this is much faster than the dense product.
    """
    if not (is_exact(a) or is_exact(b)):
        return a @ b
    vec_a, vec_b = a.ndim == 1, b.ndim == 1
    a2 = a[None, :] if vec_a else a
    b2 = b[:, None] if vec_b else b
    rows_b = [[(j, w) for j, w in enumerate(row) if w] for row in b2]
    out = zeros((a2.shape[0], b2.shape[1]), True)
    for i, row in enumerate(a2):
        acc: dict[int, Fraction] = {}
        for k, v in enumerate(row):
            if v:
                for j, w in rows_b[k]:
                    acc[j] = acc.get(j, 0) + v * w
        for j, x in acc.items():
            out[i, j] = Fraction(x)
    if vec_a and vec_b:
        return out[0, 0]
    if vec_a:
        return out[0]
    if vec_b:
        return out[:, 0]
    return out


def tensordot(a: np.ndarray, b: np.ndarray, axes=2) -> np.ndarray:
    """``np.tensordot`` routed through :func:`matmul` on exact input."""
    if not (is_exact(a) or is_exact(b)):
        return np.tensordot(a, b, axes)
    if isinstance(axes, int):
        ax_a = list(range(a.ndim - axes, a.ndim))
        ax_b = list(range(axes))
    else:
        ax_a, ax_b = axes
        ax_a = [ax_a] if isinstance(ax_a, int) else list(ax_a)
        ax_b = [ax_b] if isinstance(ax_b, int) else list(ax_b)
    ax_a = [x % a.ndim for x in ax_a]
    ax_b = [x % b.ndim for x in ax_b]
    free_a = [i for i in range(a.ndim) if i not in ax_a]
    free_b = [i for i in range(b.ndim) if i not in ax_b]
    shape_a = [a.shape[i] for i in free_a]
    shape_b = [b.shape[i] for i in free_b]
    inner = int(np.prod([a.shape[i] for i in ax_a], dtype=int))
    at = a.transpose(free_a + ax_a).reshape(int(np.prod(shape_a, dtype=int)), inner)
    bt = b.transpose(ax_b + free_b).reshape(inner, int(np.prod(shape_b, dtype=int)))
    return matmul(at, bt).reshape(shape_a + shape_b)


def same_backend(*arrays: np.ndarray) -> bool:
    kinds = {is_exact(a) for a in arrays}
    if len(kinds) > 1:
        raise BackendError("exact and float arrays mixed in one computation")
    return kinds.pop() if kinds else True


def max_abs(a: np.ndarray) -> float:
    if a.size == 0:
        return 0.0
    if is_exact(a):
        return float(max(abs(v) for v in a.reshape(-1)))
    return float(np.max(np.abs(a)))


def is_zero(a: np.ndarray, tol: float = FLOAT_TOL) -> bool:
    if is_exact(a):
        return all(v == 0 for v in a.reshape(-1))
    return max_abs(a) <= tol


def rationalize(a: np.ndarray, max_denominator: int = 10**6) -> np.ndarray:
    """Best rational approximation of a float array, entrywise."""
    out = np.empty(a.shape, dtype=object)
    for idx, v in np.ndenumerate(a):
        out[idx] = Fraction(float(v)).limit_denominator(max_denominator)
    return out


# -- elimination -----------------------------------------------------------

def rref(m: np.ndarray, tol: float = MEMBERSHIP_TOL) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form and pivot columns.

    Exact input pivots on the first nonzero entry of each column; float
    input uses partial pivoting with ``tol`` as the zero threshold.
    """
    exact = is_exact(m)
    a = np.array(m, dtype=object if exact else float, copy=True)
    rows, cols = a.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        if exact:
            p = next((i for i in range(r, rows) if a[i, c] != 0), None)
        else:
            col = np.abs(a[r:, c])
            p = r + int(np.argmax(col)) if col.size and col.max() > tol else None
        if p is None:
            continue
        if p != r:
            a[[r, p]] = a[[p, r]]
        a[r] = a[r] / a[r, c]
        for i in range(rows):
            if i != r and a[i, c] != 0:
                a[i] = a[i] - a[i, c] * a[r]
        pivots.append(c)
        r += 1
    return a, pivots


def rank(m: np.ndarray, tol: float = MEMBERSHIP_TOL) -> int:
    if m.size == 0:
        return 0
    if is_exact(m):
        return len(rref(m)[1])
    return int(np.linalg.matrix_rank(m, tol=tol))


def nullspace(m: np.ndarray, tol: float = MEMBERSHIP_TOL) -> np.ndarray:
    """Basis (as columns) of ``{x : m x = 0}``."""
    exact = is_exact(m)
    rows, cols = m.shape
    if rows == 0:
        return eye(cols, exact)
    if not exact:
        _, s, vt = np.linalg.svd(m)
        r = int(np.sum(s > tol))
        return vt[r:].T.copy()
    a, pivots = rref(m)
    free = [c for c in range(cols) if c not in pivots]
    basis = zeros((cols, len(free)), True)
    for k, f in enumerate(free):
        basis[f, k] = Fraction(1)
        for i, p in enumerate(pivots):
            basis[p, k] = -a[i, f]
    return basis


def column_basis(m: np.ndarray, tol: float = MEMBERSHIP_TOL) -> np.ndarray:
    """Linearly independent columns spanning the column space of ``m``."""
    if m.shape[1] == 0:
        return m
    if is_exact(m):
        _, pivots = rref(m)
        return m[:, pivots]
    u, s, _ = np.linalg.svd(m, full_matrices=False)
    r = int(np.sum(s > tol))
    return u[:, :r].copy()


def solve(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Solve the square nonsingular system ``a x = b``."""
    if not is_exact(a):
        return np.linalg.solve(a, b)
    n = a.shape[0]
    vec = b.ndim == 1
    rhs = b.reshape(n, -1)
    aug = np.concatenate([a, rhs], axis=1)
    red, pivots = rref(aug)
    if pivots[:n] != list(range(n)):
        raise np.linalg.LinAlgError("singular matrix")
    x = red[:n, n:]
    return x.reshape(-1) if vec else x


def inverse(a: np.ndarray) -> np.ndarray:
    return solve(a, eye(a.shape[0], is_exact(a)))


def det(a: np.ndarray):
    if not is_exact(a):
        return float(np.linalg.det(a))
    n = a.shape[0]
    if n == 0:
        return Fraction(1)
    m = np.array(a, dtype=object, copy=True)
    result = Fraction(1)
    for c in range(n):
        p = next((i for i in range(c, n) if m[i, c] != 0), None)
        if p is None:
            return Fraction(0)
        if p != c:
            m[[c, p]] = m[[p, c]]
            result = -result
        result *= m[c, c]
        for i in range(c + 1, n):
            if m[i, c] != 0:
                m[i] = m[i] - (m[i, c] / m[c, c]) * m[c]
    return result


def is_positive_definite(g: np.ndarray) -> bool:
    """Leading-principal-minor test (exact) or Cholesky (float)."""
    if is_exact(g):
        return all(det(g[:k, :k]) > 0 for k in range(1, g.shape[0] + 1))
    try:
        np.linalg.cholesky(g)
    except np.linalg.LinAlgError:
        return False
    return True


def lstsq_residual(basis: np.ndarray, v: np.ndarray) -> float:
    if basis.shape[1] == 0:
        return float(np.linalg.norm(v))
    coef, *_ = np.linalg.lstsq(basis, v, rcond=None)
    return float(np.linalg.norm(basis @ coef - v))


def in_span(v: np.ndarray, basis: np.ndarray, tol: float = MEMBERSHIP_TOL) -> bool:
    if is_exact(v):
        if basis.shape[1] == 0:
            return is_zero(v)
        return rank(np.column_stack([basis, v])) == rank(basis)
    return lstsq_residual(to_float(basis), v) < tol


def contains(big: np.ndarray, small: np.ndarray, tol: float = MEMBERSHIP_TOL) -> bool:
    return all(in_span(small[:, j], big, tol) for j in range(small.shape[1]))


def span_sum(*subspaces: np.ndarray) -> np.ndarray:
    return column_basis(np.concatenate(subspaces, axis=1))


def intersection(u: np.ndarray, w: np.ndarray, tol: float = MEMBERSHIP_TOL) -> np.ndarray:
    """Basis of ``span(u) ∩ span(w)`` via the nullspace of ``[u | -w]``."""
    n = u.shape[0]
    exact = is_exact(u)
    if u.shape[1] == 0 or w.shape[1] == 0:
        return zeros((n, 0), exact)
    ker = nullspace(np.concatenate([u, -w], axis=1), tol)
    return column_basis(u @ ker[: u.shape[1]], tol)


def same_subspace(u: np.ndarray, w: np.ndarray, tol: float = MEMBERSHIP_TOL) -> bool:
    return u.shape[1] == w.shape[1] and contains(u, w, tol) and contains(w, u, tol)


def orthogonal_complement(sub: np.ndarray, g: np.ndarray,
                          within: np.ndarray | None = None) -> np.ndarray:
    """g-orthogonal complement of ``sub``, optionally inside ``within``."""
    n = g.shape[0]
    exact = is_exact(g)
    amb = eye(n, exact) if within is None else within
    if sub.shape[1] == 0:
        return amb
    ker = nullspace((sub.T @ g) @ amb)
    return column_basis(amb @ ker) if ker.shape[1] else zeros((n, 0), exact)


def gram_schmidt(vectors: np.ndarray, g: np.ndarray) -> np.ndarray:
    """g-orthogonal (not normalized) basis of the span of ``vectors``."""
    out: list[np.ndarray] = []
    exact = is_exact(g)
    for j in range(vectors.shape[1]):
        v = vectors[:, j].copy()
        for u in out:
            v = v - (u @ g @ v) / (u @ g @ u) * u
        if (exact and not is_zero(v)) or (not exact and np.sqrt(abs(v @ g @ v)) > MEMBERSHIP_TOL):
            out.append(v)
    if not out:
        return zeros((g.shape[0], 0), exact)
    return np.column_stack(out)


def compound(m: np.ndarray, rows: Sequence[tuple[int, ...]],
             cols: Sequence[tuple[int, ...]]) -> np.ndarray:
    """Matrix of minors ``det(m[I, J])`` for I in rows, J in cols."""
    k = len(rows[0]) if rows else 0
    if not is_exact(m):
        if not rows or not cols:
            return np.zeros((len(rows), len(cols)))
        if k == 0:
            return np.ones((len(rows), len(cols)))
        ri = np.array(rows)
        ci = np.array(cols)
        sub = m[ri[:, None, :, None], ci[None, :, None, :]]
        return np.linalg.det(sub)
    out = zeros((len(rows), len(cols)), True)
    for a, i in enumerate(rows):
        mi = m[list(i)]
        for b, j in enumerate(cols):
            out[a, b] = det(mi[:, list(j)]) if k else Fraction(1)
    return out


def cholesky_frame(g: np.ndarray) -> np.ndarray:
    """Columns form a g-orthonormal frame, from ``g = L L^T``."""
    lower = np.linalg.cholesky(to_float(g))
    return np.linalg.inv(lower).T


def jacobi_eigh(s: np.ndarray, tol: float = 1e-14,
                max_sweeps: int = 100) -> tuple[np.ndarray, np.ndarray]:
    """Eigen-decomposition of a real symmetric matrix by cyclic Jacobi rotations.

    Returns ``(values, vectors)`` with eigenvalues ascending and
    orthonormal eigenvectors as columns.  Deterministic: the rotation
    order is fixed (row-major over the upper triangle).
    """
    a = np.array(to_float(s), dtype=float, copy=True)
    n = a.shape[0]
    v = np.eye(n)
    scale = max(1.0, float(np.max(np.abs(a)))) if n else 1.0
    for _ in range(max_sweeps):
        off = math.sqrt(float(np.sum(np.triu(a, 1) ** 2)))
        if off <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= 1e-300:
                    continue
                tau = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = math.copysign(1.0, tau) / (abs(tau) + math.sqrt(1.0 + tau * tau)) if tau != 0 else 1.0
                c = 1.0 / math.sqrt(1.0 + t * t)
                sn = t * c
                rot = np.eye(n)
                rot[p, p] = rot[q, q] = c
                rot[p, q] = sn
                rot[q, p] = -sn
                a = rot.T @ a @ rot
                a[p, q] = a[q, p] = 0.0
                v = v @ rot
    values = np.diag(a).copy()
    order = np.argsort(values, kind="stable")
    return values[order], v[:, order]


def cluster_values(values: Iterable[float], tol: float) -> list[list[int]]:
    """Group indices of sorted values whose consecutive gaps are <= tol."""
    vals = list(values)
    groups: list[list[int]] = []
    for i, x in enumerate(vals):
        if groups and abs(x - vals[groups[-1][-1]]) <= tol:
            groups[-1].append(i)
        else:
            groups.append([i])
    return groups
