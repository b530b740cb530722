from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from lck import linalg as la
from conftest import fractions, rational_spd


def test_parse_scalar_backends():
    assert la.parse_scalar("3/6") == Fraction(1, 2)
    assert isinstance(la.parse_scalar("0.5"), float)
    assert isinstance(la.parse_scalar(2), Fraction)
    with pytest.raises(ValueError):
        la.parse_scalar(True)
    with pytest.raises(ValueError):
        la.parse_scalar("")


def test_fraction_canonical_form():
    x = la.parse_scalar("-4/6") / la.parse_scalar("1")
    assert (x.numerator, x.denominator) == (-2, 3)


def test_mixing_backends_is_refused():
    with pytest.raises(la.BackendError):
        la.same_backend(la.eye(2, True), np.eye(2))


def test_exact_sqrt():
    assert la.exact_sqrt(Fraction(9, 4)) == Fraction(3, 2)
    assert la.exact_sqrt(Fraction(2)) is None


@given(st.lists(st.lists(fractions, min_size=4, max_size=4), min_size=3, max_size=3))
def test_rank_nullity(rows):
    m = la.exact_array(rows)
    ker = la.nullspace(m)
    assert la.rank(m) + ker.shape[1] == 4
    assert la.is_zero(m @ ker)


def test_first_nonzero_pivot_rref():
    m = la.exact_array([[0, 2, 4], [1, 1, 1]])
    r, piv = la.rref(m)
    assert piv == [0, 1]
    assert np.all(r == la.exact_array([[1, 0, -1], [0, 1, 2]]))


@given(rational_spd(4))
def test_inverse_and_det(g):
    assert np.all(la.inverse(g) @ g == la.eye(4, True))
    assert la.det(g) > 0
    assert la.is_positive_definite(g)


def test_not_positive_definite():
    assert not la.is_positive_definite(la.exact_array([[1, 2], [2, 1]]))
    assert not la.is_positive_definite(np.array([[1.0, 2.0], [2.0, 1.0]]))


def test_subspace_operations():
    u = la.exact_array([[1, 0], [0, 1], [0, 0]])
    w = la.exact_array([[0], [1], [1]])
    assert la.intersection(u, w).shape[1] == 0
    assert la.span_sum(u, w).shape[1] == 3
    assert la.contains(u, la.exact_array([[2], [3], [0]]))
    assert la.same_subspace(u, la.exact_array([[1, 1], [1, -1], [0, 0]]))


def test_orthogonal_complement_respects_metric():
    g = la.exact_array([[2, 1], [1, 2]])
    v = la.exact_array([[1], [0]])
    perp = la.orthogonal_complement(v, g)
    assert perp.shape[1] == 1
    assert (v[:, 0] @ g @ perp[:, 0]) == 0


def test_jacobi_eigh_matches_reference():
    rng = np.random.default_rng(3)
    a = rng.normal(size=(6, 6))
    s = a + a.T
    vals, vecs = la.jacobi_eigh(s)
    assert np.allclose(vals, np.linalg.eigvalsh(s), atol=1e-12)
    assert np.allclose(vecs.T @ vecs, np.eye(6), atol=1e-12)
    assert np.allclose(s @ vecs, vecs * vals, atol=1e-10)


def test_cluster_values():
    groups = la.cluster_values([0.0, 1e-10, 1.0, 1.0 + 5e-9, 2.0], 1e-8)
    assert groups == [[0, 1], [2, 3], [4]]


@given(st.integers(1, 4), st.integers(1, 4), st.integers(1, 4), st.data())
def test_sparse_matmul_matches_dense(n, k, m, data):
    a = la.exact_array([[data.draw(fractions) for _ in range(k)] for _ in range(n)])
    b = la.exact_array([[data.draw(fractions) for _ in range(m)] for _ in range(k)])
    assert np.all(la.matmul(a, b) == a @ b)
    assert np.all(la.matmul(a[0], b) == a[0] @ b)
    assert np.all(la.matmul(a, b[:, 0]) == a @ b[:, 0])
    assert la.matmul(a[0], b[:, 0]) == a[0] @ b[:, 0]


@pytest.mark.parametrize("axes", [1, ((0,), (0,)), ([2, 0], [1, 0]), (1, 2)])
def test_exact_tensordot_matches_numpy(axes):
    rng = np.random.default_rng(0)
    a = rng.integers(-3, 4, size=(3, 3, 3))
    b = rng.integers(-3, 4, size=(3, 3, 3))
    got = la.tensordot(la.exact_array(a.tolist()), la.exact_array(b.tolist()), axes)
    assert np.array_equal(la.to_float(got), np.tensordot(a, b, axes).astype(float))
