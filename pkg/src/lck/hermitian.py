"""Complex structures, Hermitian metrics, l.c.K. certificates and Levi-Civita geometry."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from fractions import Fraction

import numpy as np

from . import linalg as la
from .exterior import (AlternatingForm, FormError, InnerProduct, ce_differential, form_norm_sq,
                       fundamental_form, is_compatible, lee_form, wedge, wedge_matrix)
from .lie import LieAlgebra, ad, derived_algebra

LCK_TOL = 1e-9


class StructureError(ValueError):
    pass


class ComplexStructureError(StructureError):
    pass


class CompatibilityError(StructureError):
    pass


@dataclass(frozen=True)
class JClassification:
    almost_complex: bool
    integrable: bool
    abelian: bool
    bi_invariant: bool


def classify_J(g: LieAlgebra, j: np.ndarray, tol: float = la.FLOAT_TOL) -> JClassification:
    n = g.dim
    if n % 2:
        raise ComplexStructureError(f"odd dimension {n} carries no complex structure")
    la.same_backend(g.c, j)
    if not la.is_zero(j @ j + la.eye(n, g.exact), tol):
        return JClassification(False, False, False, False)
    cj = _brackets_in(g, j)
    integrable = abelian = bi_inv = True
    for a in range(n):
        for b in range(n):
            xy = g.c[a, b]
            jxjy = cj["JJ"][a, b]
            jx_y = cj["J1"][a, b]
            x_jy = cj["1J"][a, b]
            if integrable and not la.is_zero(jxjy - xy - j @ (jx_y + x_jy), tol):
                integrable = False
            if abelian and not la.is_zero(jxjy - xy, tol):
                abelian = False
            if bi_inv and not la.is_zero(j @ xy - x_jy, tol):
                bi_inv = False
    return JClassification(True, integrable, abelian, bi_inv)


def _brackets_in(g: LieAlgebra, j: np.ndarray) -> dict[str, np.ndarray]:
    """Tables of [Je_a, Je_b], [Je_a, e_b], [e_a, Je_b] indexed [a, b, :]."""
    c = g.c
    # [Je_a, e_b] = Σ_i J[i,a] c[i,b]
    j1 = la.tensordot(j, c, axes=(0, 0))
    # [e_a, Je_b] = Σ_i J[i,b] c[a,i]
    onej = la.tensordot(c, j, axes=(1, 0)).transpose(0, 2, 1)
    jj = la.tensordot(j, onej, axes=(0, 0))
    return {"J1": j1, "1J": onej, "JJ": jj}


@dataclass(frozen=True, eq=False)
class HermitianStructure:
    """``(g, J, <,>)`` with ``J^2 = -1`` and ``<JX, JY> = <X, Y>``.

    Integrability is not enforced here so that almost-Hermitian inputs can
    be examined; :func:`classify_J` reports it.
    """

    algebra: LieAlgebra
    J: np.ndarray
    metric: InnerProduct
    orientation: int = 1
    name: str = ""

    def __post_init__(self):
        n = self.algebra.dim
        if n % 2:
            raise ComplexStructureError(f"odd dimension {n}")
        if self.J.shape != (n, n) or self.metric.dim != n:
            raise StructureError("J and metric must match the algebra dimension")
        la.same_backend(self.algebra.c, self.J, self.metric.gmat)
        if self.J.flags.writeable:
            object.__setattr__(self, "J", la.frozen(self.J))
        tol = la.FLOAT_TOL
        if not la.is_zero(self.J @ self.J + la.eye(n, self.exact), tol):
            raise ComplexStructureError("J^2 != -1")
        if not is_compatible(self.J, self.metric, tol):
            raise CompatibilityError("metric is not J-Hermitian")
        if self.orientation not in (1, -1):
            raise StructureError("orientation must be +1 or -1")

    @property
    def dim(self) -> int:
        return self.algebra.dim

    @property
    def exact(self) -> bool:
        return self.algebra.exact

    def to_float(self) -> "HermitianStructure":
        return HermitianStructure(self.algebra.to_float(), la.to_float(self.J),
                                  self.metric.to_float(), self.orientation, self.name)

    def with_metric(self, metric: InnerProduct) -> "HermitianStructure":
        return HermitianStructure(self.algebra, self.J, metric, self.orientation, self.name)

    def __eq__(self, other):
        if not isinstance(other, HermitianStructure):
            return NotImplemented
        return (self.algebra == other.algebra and bool(np.all(self.J == other.J))
                and self.metric == other.metric and self.orientation == other.orientation)

    __hash__ = None


def fundamental_form_of(h: HermitianStructure) -> AlternatingForm:
    return fundamental_form(h.J, h.metric)


# -- l.c.K. certificate -------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class LckCertificate:
    """Outcome of checking ``dω = θ∧ω`` with θ closed.

    ``residual`` combines the two defects ``‖dω - θ∧ω‖`` and ``‖dθ‖``
    (metric norms on 3- and 2-forms).  The second term matters in real
    dimension 4, where ``ω∧`` is onto 3-forms and the first defect vanishes
    for every Hermitian metric.  ``relative_residual`` divides each defect by
    the matching power of ``‖dω‖`` and is invariant under rescaling of the
    metric.
    """

    exact: bool
    omega: AlternatingForm
    d_omega: AlternatingForm
    theta: AlternatingForm
    theta_lsq: AlternatingForm
    wedge_residual_sq: object
    closed_residual_sq: object
    d_omega_norm_sq: object
    theta_closed: bool
    is_kahler: bool
    is_vaisman: bool | None
    routes_agree: bool | None
    A: np.ndarray | None
    A_norm_sq: object | None

    @property
    def residual_sq(self):
        return self.wedge_residual_sq + self.closed_residual_sq

    @property
    def residual(self) -> float:
        return math.sqrt(float(self.residual_sq))

    @property
    def wedge_residual(self) -> float:
        return math.sqrt(float(self.wedge_residual_sq))

    @property
    def relative_residual(self) -> float:
        dn = float(self.d_omega_norm_sq)
        if self.is_kahler or dn == 0.0:
            return 0.0 if self.residual_sq == 0 else math.inf
        return math.sqrt(float(self.wedge_residual_sq) / dn + float(self.closed_residual_sq) / dn ** 2)

    @property
    def is_lck(self) -> bool:
        if self.exact:
            return self.residual_sq == 0
        return self.residual < LCK_TOL

    @property
    def theta_zero(self) -> bool:
        return self.theta.is_zero()


def lee_vector(theta: AlternatingForm, gm: InnerProduct) -> tuple[np.ndarray, object]:
    """A ⊥ ker θ with ``θ(A) = 1``, and ``|A|^2``.

    ``A = g^{-1}θ / θ(g^{-1}θ)``, so ``θ(X) = <X, A>/|A|^2``.
    """
    sharp = gm.inverse @ theta.coeffs
    s = theta.coeffs @ sharp
    if (gm.exact and s == 0) or (not gm.exact and abs(s) < 1e-300):
        raise FormError("θ = 0 has no dual vector A")
    return sharp / s, 1 / s


def theta_by_contraction(h: HermitianStructure, omega: AlternatingForm,
                         d_omega: AlternatingForm) -> AlternatingForm:
    """Least-squares θ' minimising ``‖dω - θ'∧ω‖`` via the normal equations."""
    lmat = wedge_matrix(omega, 1)
    gram3 = h.metric.form_gram(3)
    lg = la.matmul(lmat.T, gram3)
    normal = la.matmul(lg, lmat)
    rhs = la.matmul(lg, d_omega.coeffs)
    return AlternatingForm(h.dim, 1, la.solve(normal, rhs))


def check_lck(h: HermitianStructure) -> LckCertificate:
    g, gm = h.algebra, h.metric
    if h.dim < 4:
        raise FormError("l.c.K. check needs dimension >= 4")
    omega = fundamental_form_of(h)
    dw = ce_differential(g, omega)
    theta = lee_form(g, gm, h.J)
    theta_lsq = theta_by_contraction(h, omega, dw)
    diff = dw - wedge(theta, omega)
    wres = form_norm_sq(diff, gm)
    dtheta = ce_differential(g, theta)
    cres = form_norm_sq(dtheta, gm)
    dnorm = form_norm_sq(dw, gm)
    exact = h.exact
    tol = la.FLOAT_TOL
    kahler = dw.is_zero(tol)
    closed = dtheta.is_zero(tol)
    resid_zero = (wres + cres == 0) if exact else math.sqrt(float(wres + cres)) < LCK_TOL
    agree = theta.close_to(theta_lsq, 1e-8) if resid_zero else None
    A = a_sq = None
    if not theta.is_zero(tol):
        A, a_sq = lee_vector(theta, gm)
    cert = LckCertificate(exact, omega, dw, theta, theta_lsq, wres, cres, dnorm, closed,
                          kahler, None, agree, A, a_sq)
    if resid_zero and not kahler and A is not None:
        cert = replace(cert, is_vaisman=is_vaisman(h, cert) is True)
    return cert


# -- Levi-Civita connection and curvature ------------------------------------------------

@dataclass(frozen=True, eq=False)
class Connection:
    """``∇_{e_i} e_j = Σ_k gamma[i, j, k] e_k``."""

    gamma: np.ndarray

    def matrix(self, x: np.ndarray) -> np.ndarray:
        """Matrix of ``Y -> ∇_x Y`` (column j is ``∇_x e_j``)."""
        return la.tensordot(x, self.gamma, axes=(0, 0)).T

    def apply(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        return self.matrix(x) @ y


def levi_civita(g: LieAlgebra, gm: InnerProduct) -> Connection:
    """Koszul: ``2<∇_X Y, Z> = <[X,Y],Z> - <[Y,Z],X> + <[Z,X],Y>``."""
    la.same_backend(g.c, gm.gmat)
    lowered = la.tensordot(g.c, gm.gmat, axes=(2, 0))  # <[e_i,e_j], e_k> at [i, j, k]
    koszul = lowered - lowered.transpose(2, 0, 1) + lowered.transpose(1, 2, 0)
    half = Fraction(1, 2) if g.exact else 0.5
    low = koszul * half
    gamma = la.tensordot(low, gm.inverse, axes=(2, 1))
    return Connection(la.frozen(gamma))


def nabla_theta(g: LieAlgebra, gm: InnerProduct, theta: AlternatingForm,
                conn: Connection | None = None) -> np.ndarray:
    """``(∇_{e_i} θ)(e_j) = -θ(∇_{e_i} e_j)`` as a matrix [i, j]."""
    conn = conn or levi_civita(g, gm)
    return -(conn.gamma @ theta.coeffs)


def is_ad_skew(g: LieAlgebra, gm: InnerProduct, x: np.ndarray, tol: float = la.FLOAT_TOL) -> bool:
    m = gm.gmat @ ad(g, x)
    return la.is_zero(m + m.T, tol)


def is_ad_symmetric(g: LieAlgebra, gm: InnerProduct, x: np.ndarray, tol: float = la.FLOAT_TOL) -> bool:
    m = gm.gmat @ ad(g, x)
    return la.is_zero(m - m.T, tol)


class VaismanDisagreement(AssertionError):
    pass


def is_vaisman(h: HermitianStructure, cert: LckCertificate) -> bool | str:
    """Vaisman test by two routes: ∇θ = 0 and skew-symmetry of ad_A.

    Returns the string ``"kahler"`` for θ = 0.
    """
    if not cert.is_lck:
        raise StructureError("Vaisman test called on a structure that is not l.c.K.")
    if cert.A is None:
        return "kahler"
    tol = 1e-8
    route1 = la.is_zero(nabla_theta(h.algebra, h.metric, cert.theta), tol)
    route2 = is_ad_skew(h.algebra, h.metric, cert.A, tol)
    if route1 != route2:
        raise VaismanDisagreement(f"∇θ = 0 is {route1} but ad_A skew is {route2}")
    return route1


def check_J_adJA_symmetric(h: HermitianStructure, cert: LckCertificate) -> bool:
    """Symmetry of ``J ∘ ad_{JA}`` with respect to the metric."""
    if not cert.is_lck:
        raise StructureError("structure is not l.c.K.")
    if cert.A is None:
        return True
    ja = h.J @ cert.A
    m = h.metric.gmat @ h.J @ ad(h.algebra, ja)
    return la.is_zero(m - m.T, 1e-8)


def curvature(g: LieAlgebra, gm: InnerProduct, conn: Connection | None = None) -> np.ndarray:
    """``R[i, j]`` is the matrix of ``R(e_i, e_j) = [∇_i, ∇_j] - ∇_{[e_i, e_j]}``."""
    conn = conn or levi_civita(g, gm)
    n = g.dim
    nab = np.array([conn.matrix(g.basis_vector(i)) for i in range(n)])  # [i, :, :]
    nb = np.transpose(conn.gamma, (0, 2, 1))
    r = la.zeros((n, n, n, n), g.exact)
    for i in range(n):
        for j in range(n):
            r[i, j] = (la.matmul(nab[i], nab[j]) - la.matmul(nab[j], nab[i])
                       - la.tensordot(g.c[i, j], nb, axes=(0, 0)))
    return r


def curvature_lowered(g: LieAlgebra, gm: InnerProduct) -> np.ndarray:
    """``Rl[i, j, k, l] = <R(e_i, e_j) e_k, e_l>``."""
    r = curvature(g, gm)
    # r[i, j][m, k] is the e_m component of R(e_i,e_j)e_k
    return la.tensordot(r, gm.gmat, axes=(2, 0))


def scalar_curvature(g: LieAlgebra, gm: InnerProduct) -> object:
    """``Σ_{a,b} <R(f_a, f_b) f_b, f_a>`` over a g-orthonormal frame.

    Exact metrics contract with ``g^{-1}`` (frame independent, stays
    rational); float metrics use the Cholesky frame.
    """
    if gm.exact:
        rl = curvature_lowered(g, gm)
        gi = gm.inverse
        # Σ gi[i,l] gi[j,k] Rl[i,j,k,l]
        t = la.tensordot(rl, gi, axes=([0, 3], [0, 1]))   # [j, k]
        return np.sum(t * gi)
    return scalar_curvature_frame(g, gm)


def scalar_curvature_frame(g: LieAlgebra, gm: InnerProduct) -> float:
    gf = g if not g.exact else g.to_float()
    mf = gm if not gm.exact else gm.to_float()
    frame = la.cholesky_frame(mf.gmat)
    r = curvature(gf, mf)
    total = 0.0
    n = g.dim
    for a in range(n):
        fa = frame[:, a]
        for b in range(n):
            fb = frame[:, b]
            rab = la.tensordot(la.tensordot(fa, r, axes=(0, 0)), fb, axes=(0, 0))
            total += float(fa @ mf.gmat @ (rab @ fb))
    return total


# -- consistency audit ----------------------------------------------------------

@dataclass(frozen=True)
class KahlerBiInvariantVerdict:
    applicable: bool
    consistent: bool
    message: str


class LibraryFalsified(AssertionError):
    """A theorem-backed predicate failed: the library itself is wrong."""


def kahler_bi_invariant_audit(h: HermitianStructure) -> KahlerBiInvariantVerdict:
    """Kähler + bi-invariant J must force an abelian algebra."""
    cls = classify_J(h.algebra, h.J)
    cert = check_lck(h)
    if not (cert.is_kahler and cls.bi_invariant):
        reason = "not Kähler" if not cert.is_kahler else "J not bi-invariant"
        return KahlerBiInvariantVerdict(False, True, f"vacuous: {reason}")
    if derived_algebra(h.algebra).shape[1] != 0:
        raise LibraryFalsified("Kähler with bi-invariant J on a non-abelian algebra")
    return KahlerBiInvariantVerdict(True, True, "Kähler, bi-invariant, abelian")
