from fractions import Fraction

import numpy as np
import pytest

from lck import catalog as cat
from lck import linalg as la
from lck.exterior import InnerProduct
from lck.hermitian import HermitianStructure, check_lck
from lck.lie import LieAlgebra, ad_traces, change_basis, derived_algebra
from lck.search import project_hermitian
from lck.structure import (PreconditionError, audit_abelian_lck, check_abelian_J_properties,
                           decompose, extract_A, normal_form_abelian, recognize_bi_invariant_model,
                           recognize_heisenberg, symmetric_spectrum)

HEIS = [cat.heisenberg_family(n, lam) for n in (1, 2, 3) for lam in (1, 2, Fraction(1, 2))]


def transform(h: HermitianStructure, p) -> HermitianStructure:
    """The same structure written in the basis given by the columns of p."""
    p = la.exact_array(p)
    return HermitianStructure(change_basis(h.algebra, p), la.frozen(la.inverse(p) @ h.J @ p),
                              InnerProduct(p.T @ h.metric.gmat @ p))


def unimodular_triangular(n, seed):
    rng = np.random.default_rng(seed)
    p = la.eye(n, True)
    for a in range(n):
        for b in range(a):
            p[a, b] = Fraction(int(rng.integers(-2, 3)))
    return p


def test_decompose_heisenberg():
    h = cat.heisenberg_family(2, 1)
    dec = decompose(h)
    assert dec.exact_spectrum
    assert dec.nonzero_spectrum == []
    assert dec.g0.shape[1] == 5
    assert np.all(dec.A == h.algebra.basis_vector(5))
    assert dec.W.shape[1] == 4


def test_decompose_aff_spectrum():
    dec = decompose(cat.aff("C"))
    assert sorted((lam, b.shape[1]) for lam, b in dec.spectrum) == [(Fraction(-1, 2), 2), (0, 1)]
    # -(λ+1) = λ for λ = -1/2, so the eigenvalue pairs with itself
    assert dec.lambda_set() == []


def test_decompose_preconditions():
    with pytest.raises(PreconditionError, match="Kähler"):
        decompose(cat.flat(4))
    with pytest.raises(PreconditionError, match="not abelian"):
        decompose(cat.acfm_solvable())
    h = cat.heisenberg_family(2, 1)
    g = h.metric.gmat.copy()
    g[0, 1] = g[1, 0] = g[2, 3] = g[3, 2] = Fraction(1, 6)
    assert check_lck(h.with_metric(InnerProduct(g))).residual_sq == Fraction(72, 1225)
    with pytest.raises(PreconditionError, match="not l.c.K"):
        decompose(h.with_metric(InnerProduct(g)))


def test_extract_A_requires_theta():
    h = cat.flat(4)
    with pytest.raises(PreconditionError):
        extract_A(h, check_lck(h).theta)


def test_symmetric_spectrum_float_path():
    gm = InnerProduct.identity(3).to_float()
    op = np.diag([1.0, 1.0 + 1e-12, -2.0])
    spec, exact = symmetric_spectrum(op, np.eye(3), gm)
    assert not exact
    assert sorted((round(v, 6), b.shape[1]) for v, b in spec) == [(-2.0, 1), (1.0, 2)]


@pytest.mark.parametrize("h", HEIS, ids=lambda h: h.name)
def test_audit_passes_unimodular(h):
    report = audit_abelian_lck(h)
    assert report.passed, report.table()
    assert not report.skipped()


def test_audit_non_unimodular_skips_unimodular_checks():
    report = audit_abelian_lck(cat.aff("C"))
    assert not report["pre:unimodular"].passed
    assert [c.name for c in report.failed()] == ["pre:unimodular"]
    assert "feo.i" in [c.name for c in report.skipped()]
    assert report["eq2"].passed and report["Jgl"].passed


def test_audit_reports_preconditions_for_acfm():
    report = audit_abelian_lck(cat.acfm_solvable())
    assert not report["pre:abelian_J"].passed
    assert "eq1" not in report


def test_feo_identity_values():
    h = cat.heisenberg_family(1, 2)
    report = audit_abelian_lck(h)
    for name in ("feo.i", "feo.ii", "feo1.i", "final_prop.i", "final_prop.ii"):
        assert report[name].worst_violation == 0


def test_audit_after_basis_change():
    h = transform(cat.heisenberg_family(1, 1), unimodular_triangular(4, 3))
    assert audit_abelian_lck(h).passed


def test_abelian_J_properties():
    h = cat.heisenberg_family(1, 1)
    r = check_abelian_J_properties(h.algebra, h.J)
    assert r.passed and r["codim_g'>=2"].note == "codim g' = 3"
    a = cat.aff("dual")
    assert check_abelian_J_properties(a.algebra, a.J).passed


def test_aff_R_exemption():
    from lck.lie import aff_construct
    g, j = aff_construct(cat.associative("R"))
    r = check_abelian_J_properties(g, j)
    assert r["codim_g'>=2"].passed and r["codim_g'>=2"].note == "aff(R) exemption"


def test_non_abelian_J_rejected():
    a = cat.acfm_solvable()
    with pytest.raises(PreconditionError):
        check_abelian_J_properties(a.algebra, a.J)


@pytest.mark.parametrize("n", [1, 2])
def test_recognize_heisenberg(n):
    rec = recognize_heisenberg(cat.heisenberg_algebra(n))
    assert rec is not None and rec.n == n
    p = unimodular_triangular(2 * n + 2, n)
    rec = recognize_heisenberg(change_basis(cat.heisenberg_algebra(n), p))
    assert rec is not None and rec.n == n


def test_recognize_heisenberg_negative():
    assert recognize_heisenberg(cat.acfm_solvable().algebra) is None
    assert recognize_heisenberg(LieAlgebra.from_constants(la.zeros((4, 4, 4), True))) is None
    assert recognize_heisenberg(cat.complex_heisenberg().algebra) is None


def test_normal_form_identity_case():
    nf = normal_form_abelian(cat.heisenberg_family(1, 1))
    assert nf.ok and nf.exact and nf.lam == 1
    assert np.all(nf.basis == la.eye(4, True))


def test_normal_form_recovers_lambda():
    nf = normal_form_abelian(cat.heisenberg_family(2, 4))
    assert nf.ok and nf.lam == 4
    z2 = nf.basis[:, 5]
    assert z2 @ cat.heisenberg_family(2, 4).metric.gmat @ z2 == Fraction(1, 4)


def test_normal_form_invariant_under_unitary_change():
    # a rotation on the (X, Y) block commuting with J_0 preserves λ
    h = cat.heisenberg_family(1, 3)
    c, s = Fraction(3, 5), Fraction(4, 5)
    p = la.exact_array([[c, -s, 0, 0], [s, c, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]])
    assert normal_form_abelian(transform(h, p)).lam == 3


def test_normal_form_float_fallback():
    g = la.eye(4, True)
    g[0, 0] = g[1, 1] = Fraction(2)
    nf = normal_form_abelian(cat.heisenberg_family(1, 1).with_metric(InnerProduct(g)))
    assert nf.ok and not nf.exact


@pytest.mark.parametrize("n", [1, 3])
def test_bi_invariant_recognition(n):
    rec = recognize_bi_invariant_model(cat.bi_model(n))
    assert rec is not None and rec.n == n and rec.report.passed
    A = rec.basis[:, 0]
    assert sum(cat.bi_model(n).algebra.ad_matrices[k].trace() * A[k] for k in range(2 * n + 2)) == -n


def test_bi_invariant_requires_bi_invariant_J():
    with pytest.raises(PreconditionError):
        recognize_bi_invariant_model(cat.heisenberg_family(1, 1))
    with pytest.raises(PreconditionError):
        recognize_bi_invariant_model(cat.complex_heisenberg())


def test_derived_algebra_of_bi_model_is_J_invariant():
    h = cat.bi_model(2)
    d = derived_algebra(h.algebra)
    assert d.shape[1] == 4 and la.contains(d, h.J @ d)


def random_hermitian(h, seed):
    rng = np.random.default_rng(seed)
    lower = la.zeros((h.dim, h.dim), True)
    for a in range(h.dim):
        for b in range(a):
            lower[a, b] = Fraction(int(rng.integers(-2, 3)), int(rng.integers(1, 4)))
        lower[a, a] = Fraction(int(rng.integers(1, 4)))
    return h.with_metric(project_hermitian(InnerProduct(lower @ lower.T), h.J))


@pytest.mark.parametrize("seed", range(6))
def test_abelian_unimodular_certificates_reach_normal_form(seed):
    h = random_hermitian(cat.heisenberg_family(1, 1), seed)
    cert = check_lck(h)
    assert cert.residual_sq == 0      # these seeds all give l.c.K. metrics
    rec = recognize_heisenberg(h.algebra)
    nf = normal_form_abelian(h, cert)
    assert rec is not None and rec.n == 1
    assert nf.ok and float(nf.lam) == pytest.approx(float(cert.A_norm_sq))


@pytest.mark.parametrize("seed", range(6))
def test_bi_invariant_certificates_are_not_unimodular(seed):
    h = random_hermitian(cat.bi_model(1), seed)
    cert = check_lck(h)
    assert cert.residual_sq == 0
    assert ad_traces(h.algebra) @ cert.A != 0


@pytest.mark.parametrize("lam", [Fraction(1), Fraction(3), Fraction(1, 2)])
def test_A_for_the_lambda_family(lam):
    h = cat.heisenberg_family(1, lam)
    cert = check_lck(h)
    assert np.all(cert.A == h.algebra.basis_vector(3) * lam)
    assert cert.A_norm_sq == lam
    assert np.all(extract_A(h, cert.theta) == cert.A)
