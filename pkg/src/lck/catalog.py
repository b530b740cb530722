"""Built-in structures and the ``lck-algebra/1`` file format."""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Sequence

import numpy as np

from . import linalg as la
from .exterior import InnerProduct, MetricError
from .hermitian import (CompatibilityError, ComplexStructureError, HermitianStructure,
                        StructureError)
from .lie import (AssociativeAlgebra, JacobiError, LieAlgebra, LieAlgebraError, aff_construct,
                  check_jacobi)

FORMAT = "lck-algebra/1"


def _one(exact: bool):
    return Fraction(1) if exact else 1.0


def _scalar(x, exact: bool):
    s = la.parse_scalar(x)
    return Fraction(s) if exact else float(s)


# -- Heisenberg family ------------------------------------------------------------------

def heisenberg_constants(n: int, exact: bool = True) -> np.ndarray:
    """Constants of ``R x h_{2n+1}`` in the basis X_1..X_n, Y_1..Y_n, Z_1, Z_2."""
    dim = 2 * n + 2
    c = la.zeros((dim, dim, dim), exact)
    for i in range(n):
        c[i, n + i, 2 * n] = _one(exact)
        c[n + i, i, 2 * n] = -_one(exact)
    return c


def j0_matrix(n: int, exact: bool = True) -> np.ndarray:
    """J_0 X_i = Y_i, J_0 Z_1 = -Z_2."""
    dim = 2 * n + 2
    j = la.zeros((dim, dim), exact)
    one = _one(exact)
    for i in range(n):
        j[n + i, i] = one
        j[i, n + i] = -one
    j[2 * n + 1, 2 * n] = -one
    j[2 * n, 2 * n + 1] = one
    return j


def heisenberg_algebra(n: int, exact: bool = True) -> LieAlgebra:
    if n < 1:
        raise ValueError("n must be at least 1")
    labels = ([f"X{i + 1}" for i in range(n)] + [f"Y{i + 1}" for i in range(n)]
              + ["Z1", "Z2"])
    return LieAlgebra.from_constants(heisenberg_constants(n, exact), labels,
                                     [s.lower() for s in labels], exact=exact)


def heisenberg_family(n: int, lam=1) -> HermitianStructure:
    """``R x h_{2n+1}`` with J_0 and the metric with ``|Z_1|^2 = |Z_2|^2 = 1/lam``."""
    lam = la.parse_scalar(lam)
    if n < 1:
        raise ValueError("n must be at least 1")
    if lam <= 0:
        raise ValueError("lambda must be positive")
    exact = isinstance(lam, Fraction)
    g = heisenberg_algebra(n, exact)
    gm = la.eye(2 * n + 2, exact)
    gm[2 * n, 2 * n] = 1 / lam
    gm[2 * n + 1, 2 * n + 1] = 1 / lam
    return HermitianStructure(g, la.frozen(j0_matrix(n, exact)), InnerProduct(la.frozen(gm)),
                              name=f"heisenberg({n},{lam})")


# -- other examples --------------------------------------------------------------------

def acfm_solvable() -> HermitianStructure:
    """Unimodular solvable 4-dim l.c.K. example, basis A, X, Y, Z."""
    g = LieAlgebra.from_brackets(4, {(0, 1): {1: 1}, (0, 2): {2: -1}, (1, 2): {3: 1}},
                                 ["A", "X", "Y", "Z"], ["alpha", "x", "y", "z"])
    j = la.zeros((4, 4), True)
    j[2, 0], j[0, 2] = Fraction(1), Fraction(-1)   # JA = Y, JY = -A
    j[1, 3], j[3, 1] = Fraction(1), Fraction(-1)   # JZ = X, JX = -Z
    return HermitianStructure(g, la.frozen(j), InnerProduct.identity(4), name="acfm")


def bi_model(n: int) -> HermitianStructure:
    """``R^2 ⋉ R^{2n}``: ``[A, X] = -X/2``, ``[B, X] = -JX/2``, JA = B, JX_i = Y_i."""
    if n < 1:
        raise ValueError("n must be at least 1")
    dim = 2 * n + 2
    half = Fraction(1, 2)
    br: dict[tuple[int, int], dict[int, object]] = {}
    for i in range(n):
        x, y = 2 + i, 2 + n + i
        br[(0, x)] = {x: -half}
        br[(0, y)] = {y: -half}
        br[(1, x)] = {y: -half}
        br[(1, y)] = {x: half}
    labels = ["A", "B"] + [f"X{i + 1}" for i in range(n)] + [f"Y{i + 1}" for i in range(n)]
    duals = ["alpha", "beta"] + [s.lower() for s in labels[2:]]
    g = LieAlgebra.from_brackets(dim, br, labels, duals)
    j = la.zeros((dim, dim), True)
    j[1, 0], j[0, 1] = Fraction(1), Fraction(-1)
    for i in range(n):
        x, y = 2 + i, 2 + n + i
        j[y, x], j[x, y] = Fraction(1), Fraction(-1)
    return HermitianStructure(g, la.frozen(j), InnerProduct.identity(dim), name=f"bi_model({n})")


def standard_j(dim: int, exact: bool = True) -> np.ndarray:
    """J e_{2i} = e_{2i+1}."""
    j = la.zeros((dim, dim), exact)
    for i in range(0, dim, 2):
        j[i + 1, i] = _one(exact)
        j[i, i + 1] = -_one(exact)
    return la.frozen(j)


def flat(dim: int = 4) -> HermitianStructure:
    if dim < 2 or dim % 2:
        raise ValueError("dimension must be even and positive")
    labels = [f"E{i + 1}" for i in range(dim)]
    g = LieAlgebra.from_constants(la.zeros((dim, dim, dim), True), labels,
                                  [f"e{i + 1}" for i in range(dim)])
    return HermitianStructure(g, standard_j(dim), InnerProduct.identity(dim), name=f"flat({dim})")


def complex_heisenberg() -> HermitianStructure:
    """Complex Heisenberg algebra as a real 6-dim algebra; J is bi-invariant.

    Basis X_1, X_2, X_3, Y_1, Y_2, Y_3 with Y_i = J X_i.
    """
    br = {(0, 1): {2: 1}, (0, 4): {5: 1}, (3, 1): {5: 1}, (3, 4): {2: -1}}
    labels = ["X1", "X2", "X3", "Y1", "Y2", "Y3"]
    g = LieAlgebra.from_brackets(6, br, labels, [s.lower() for s in labels])
    j = la.zeros((6, 6), True)
    for i in range(3):
        j[3 + i, i], j[i, 3 + i] = Fraction(1), Fraction(-1)
    return HermitianStructure(g, la.frozen(j), InnerProduct.identity(6), name="complex_heisenberg")


# -- associative algebras and aff ----------------------------------------------------------

def _monomials(dim: int, rule, name: str) -> AssociativeAlgebra:
    products = {}
    for i in range(dim):
        for j in range(dim):
            image = rule(i, j)
            if image:
                products[(i, j)] = image
    return AssociativeAlgebra.from_products(dim, products, name)


def _truncated(k: int, unital: bool) -> callable:
    # basis t^s for s in [0, k) (unital) or [1, k) (non-unital)
    off = 0 if unital else 1

    def rule(i, j):
        s = i + j + 2 * off
        return {s - off: 1} if s < k else None
    return rule


def _product(*factors: AssociativeAlgebra, name: str) -> AssociativeAlgebra:
    """Direct product of algebras."""
    dim = sum(f.dim for f in factors)
    a = la.zeros((dim, dim, dim), True)
    off = 0
    for f in factors:
        m = f.dim
        a[off:off + m, off:off + m, off:off + m] = f.a
        off += m
    return AssociativeAlgebra(la.frozen(a), name)


def associative_catalog() -> dict[str, AssociativeAlgebra]:
    """Small commutative associative algebras (dim <= 4) plus one non-commutative one."""
    real = _monomials(1, lambda i, j: {0: 1}, "R")
    null1 = AssociativeAlgebra.from_products(1, {}, "null1")
    cat = {
        "R": real,
        "null1": null1,
        "null2": AssociativeAlgebra.from_products(2, {}, "null2"),
        "R2": _product(real, real, name="R2"),
        "dual": _monomials(2, _truncated(2, True), "dual"),
        "trunc3": _monomials(3, _truncated(3, True), "trunc3"),
        "trunc4": _monomials(4, _truncated(4, True), "trunc4"),
        "t_t2": _monomials(2, _truncated(3, False), "t_t2"),
        "t_t2_t3": _monomials(3, _truncated(4, False), "t_t2_t3"),
        "C": AssociativeAlgebra.from_products(
            2, {(0, 0): {0: 1}, (0, 1): {1: 1}, (1, 0): {1: 1}, (1, 1): {0: -1}}, "C"),
        "R_x_null1": _product(real, null1, name="R_x_null1"),
        "dual_x_R": None,
        # span{x, y, xy} in R[x, y]/(x^2, y^2)
        "xy": AssociativeAlgebra.from_products(3, {(0, 1): {2: 1}, (1, 0): {2: 1}}, "xy"),
        # 2x2 upper triangular matrices e11, e12, e22
        "upper2": AssociativeAlgebra.from_products(
            3, {(0, 0): {0: 1}, (0, 1): {1: 1}, (1, 2): {1: 1}, (2, 2): {2: 1}}, "upper2"),
    }
    cat["dual_x_R"] = _product(cat["dual"], real, name="dual_x_R")
    return cat


def associative(name: str) -> AssociativeAlgebra:
    cat = associative_catalog()
    if name not in cat:
        raise KeyError(f"unknown associative algebra {name!r}; known: {', '.join(cat)}")
    return cat[name]


def aff(name_or_alg: str | AssociativeAlgebra) -> HermitianStructure:
    """aff(A) with its standard J and the identity metric."""
    alg = associative(name_or_alg) if isinstance(name_or_alg, str) else name_or_alg
    g, j = aff_construct(alg)
    return HermitianStructure(g, j, InnerProduct.identity(g.dim, alg.exact),
                              name=f"aff({alg.name})")


def builtin(name: str, params: Sequence[str] = ()) -> HermitianStructure:
    """Construct a catalog entry from a name and string parameters."""
    p = list(params)
    try:
        if name == "heisenberg":
            n = int(p[0]) if p else 1
            return heisenberg_family(n, p[1] if len(p) > 1 else 1)
        if name == "acfm":
            return acfm_solvable()
        if name == "bi_model":
            return bi_model(int(p[0]) if p else 1)
        if name == "flat":
            return flat(int(p[0]) if p else 4)
        if name == "complex_heisenberg":
            return complex_heisenberg()
        if name == "aff":
            return aff(p[0] if p else "C")
    except (ValueError, IndexError) as exc:
        raise ValueError(f"bad parameters for {name}: {exc}") from None
    raise KeyError(f"unknown catalog entry {name!r}")


CATALOG_NAMES = ("heisenberg", "acfm", "bi_model", "aff", "flat", "complex_heisenberg")


def all_structures() -> list[HermitianStructure]:
    """A representative list of every built-in Hermitian structure."""
    items = [heisenberg_family(n, lam) for n in (1, 2, 3) for lam in (1, 2, Fraction(1, 2))]
    items += [acfm_solvable(), flat(4), flat(6), complex_heisenberg()]
    items += [bi_model(n) for n in (1, 2, 3)]
    items += [aff(a) for a in associative_catalog().values() if 2 <= a.dim <= 3]
    return items


# -- file format ----------------------------------------------------------------------------

class ParseError(ValueError):
    """Malformed AlgebraFile; ``location`` names the offending field or line."""

    def __init__(self, message: str, location: str = ""):
        self.location = location
        super().__init__(f"{location}: {message}" if location else message)


@dataclass(frozen=True, eq=False)
class AlgebraFile:
    algebra: LieAlgebra
    J: np.ndarray | None = None
    metric: InnerProduct | None = None
    orientation: int = 1
    name: str = ""

    @property
    def exact(self) -> bool:
        return self.algebra.exact

    def structure(self) -> HermitianStructure:
        if self.J is None or self.metric is None:
            raise StructureError("file has no J or no metric")
        return HermitianStructure(self.algebra, self.J, self.metric, self.orientation, self.name)

    @classmethod
    def from_structure(cls, h: HermitianStructure) -> "AlgebraFile":
        return cls(h.algebra, h.J, h.metric, h.orientation, h.name)


def _has_float(obj) -> bool:
    if isinstance(obj, float):
        return True
    if isinstance(obj, str):
        try:
            return isinstance(la.parse_scalar(obj), float)
        except (ValueError, ZeroDivisionError):
            return False
    if isinstance(obj, list):
        return any(_has_float(x) for x in obj)
    return False


def _read_scalar(x, exact: bool, where: str):
    if isinstance(x, bool) or not isinstance(x, (int, float, str)):
        raise ParseError(f"expected a number or rational string, got {x!r}", where)
    try:
        return _scalar(x, exact)
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"bad scalar {x!r}", where) from None


def _read_matrix(data, dim: int, exact: bool, where: str) -> np.ndarray:
    if not isinstance(data, list) or len(data) != dim:
        raise ParseError(f"expected {dim} rows", where)
    m = la.zeros((dim, dim), exact)
    for r, row in enumerate(data):
        if not isinstance(row, list) or len(row) != dim:
            raise ParseError(f"expected {dim} entries", f"{where}[{r}]")
        for c, x in enumerate(row):
            m[r, c] = _read_scalar(x, exact, f"{where}[{r}][{c}]")
    return la.frozen(m)


def _read_labels(doc: dict, key: str, dim: int) -> list[str]:
    labels = doc.get(key, [])
    if not isinstance(labels, list) or any(not isinstance(s, str) for s in labels):
        raise ParseError("expected a list of strings", key)
    if labels and len(labels) != dim:
        raise ParseError(f"expected {dim} labels", key)
    return labels


def parse(text: str, source: str = "<string>", force_exact: bool = False) -> AlgebraFile:
    """Parse and validate an AlgebraFile document."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, f"{source}:{exc.lineno}:{exc.colno}") from None
    if not isinstance(doc, dict):
        raise ParseError("top level must be an object", source)
    if doc.get("format", FORMAT) != FORMAT:
        raise ParseError(f"unsupported format {doc.get('format')!r}", "format")
    known = {"format", "name", "dim", "labels", "dual_labels", "brackets", "J", "metric",
             "orientation"}
    for key in doc:
        if key not in known:
            raise ParseError("unknown field", key)
    dim = doc.get("dim")
    if isinstance(dim, bool) or not isinstance(dim, int) or dim < 1:
        raise ParseError("dim must be a positive integer", "dim")
    float_input = any(_has_float(doc.get(k)) for k in ("brackets", "J", "metric"))
    if force_exact and float_input:
        raise ParseError("decimal entries present but exact arithmetic was requested", source)
    exact = not float_input
    labels = _read_labels(doc, "labels", dim)
    duals = _read_labels(doc, "dual_labels", dim)

    entries = doc.get("brackets", [])
    if not isinstance(entries, list):
        raise ParseError("expected a list", "brackets")
    c = la.zeros((dim, dim, dim), exact)
    seen = set()
    for t, entry in enumerate(entries):
        where = f"brackets[{t}]"
        if not isinstance(entry, list) or len(entry) != 4:
            raise ParseError("expected [i, j, k, coeff]", where)
        idx = entry[:3]
        for p, v in enumerate(idx):
            if isinstance(v, bool) or not isinstance(v, int) or not 0 <= v < dim:
                raise ParseError(f"index must be an integer in [0, {dim})", f"{where}[{p}]")
        i, j, k = idx
        if i >= j:
            raise ParseError("bracket entries need i < j", where)
        if (i, j, k) in seen:
            raise ParseError(f"duplicate entry ({i}, {j}, {k})", where)
        seen.add((i, j, k))
        coeff = _read_scalar(entry[3], exact, f"{where}[3]")
        c[i, j, k] = coeff
        c[j, i, k] = -coeff
    try:
        g = LieAlgebra.from_constants(c, labels, duals, exact=exact)
    except LieAlgebraError as exc:
        raise ParseError(str(exc), "brackets") from None
    rep = check_jacobi(g)
    if not rep.ok:
        raise JacobiError(f"Jacobi identity fails at basis triple {rep.witness_triple} "
                          f"(violation {rep.worst_violation:.3g})")

    j_mat = None
    if doc.get("J") is not None:
        j_mat = _read_matrix(doc["J"], dim, exact, "J")
        if dim % 2:
            raise ComplexStructureError("J given on an odd-dimensional algebra")
        if not la.is_zero(j_mat @ j_mat + la.eye(dim, exact), la.FLOAT_TOL):
            raise ComplexStructureError("J^2 != -I")
    metric = None
    if doc.get("metric") is not None:
        m = _read_matrix(doc["metric"], dim, exact, "metric")
        if not la.is_zero(m - m.T, la.FLOAT_TOL):
            raise MetricError("metric is not symmetric")
        if not la.is_positive_definite(m):
            raise MetricError("metric is not positive definite")
        metric = InnerProduct(m)
    orientation = doc.get("orientation", 1)
    if orientation not in (1, -1) or isinstance(orientation, bool):
        raise ParseError("orientation must be 1 or -1", "orientation")
    name = doc.get("name", "")
    if not isinstance(name, str):
        raise ParseError("expected a string", "name")
    if j_mat is not None and metric is not None:
        try:
            HermitianStructure(g, j_mat, metric, orientation, name)
        except CompatibilityError:
            raise
        except StructureError as exc:
            raise CompatibilityError(str(exc)) from None
    return AlgebraFile(g, j_mat, metric, orientation, name)


def load(path: str | Path, force_exact: bool = False) -> AlgebraFile:
    p = Path(path)
    return parse(p.read_text(), str(p), force_exact)


def _fmt(x) -> str | float:
    return str(x) if isinstance(x, Fraction) else float(x)


def dumps(obj: AlgebraFile | HermitianStructure | LieAlgebra) -> str:
    """Canonical text: sorted sparse brackets, fixed key order, one row per line."""
    if isinstance(obj, HermitianStructure):
        obj = AlgebraFile.from_structure(obj)
    elif isinstance(obj, LieAlgebra):
        obj = AlgebraFile(obj)
    g = obj.algebra
    n = g.dim
    lines = ["{", f'  "format": {json.dumps(FORMAT)},']
    if obj.name:
        lines.append(f'  "name": {json.dumps(obj.name)},')
    lines.append(f'  "dim": {n},')
    if g.labels:
        lines.append(f'  "labels": {json.dumps(list(g.labels))},')
    if g.dual_labels:
        lines.append(f'  "dual_labels": {json.dumps(list(g.dual_labels))},')
    entries = [[i, j, k, _fmt(g.c[i, j, k])] for i in range(n) for j in range(i + 1, n)
               for k in range(n) if g.c[i, j, k] != 0]
    body = ",\n".join(f"    {json.dumps(e)}" for e in entries)
    lines.append('  "brackets": [' + ("\n" + body + "\n  " if entries else "") + "],")

    def matrix(key, m):
        rows = ",\n".join(f"    {json.dumps([_fmt(x) for x in row])}" for row in m)
        lines.append(f'  "{key}": [\n{rows}\n  ],')

    if obj.J is not None:
        matrix("J", obj.J)
    if obj.metric is not None:
        matrix("metric", obj.metric.gmat)
    lines.append(f'  "orientation": {obj.orientation}')
    lines.append("}")
    return "\n".join(lines) + "\n"


def save(obj, path: str | Path) -> None:
    Path(path).write_text(dumps(obj))
