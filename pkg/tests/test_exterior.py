from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from lck import catalog as cat
from lck import linalg as la
from lck.exterior import (AlternatingForm, FormError, InnerProduct, MetricError, ce_differential,
                          codifferential, form_inner, fundamental_form, hodge_star, lee_form,
                          volume_form, wedge)
from conftest import fractions, rational_spd


def form(dim, terms):
    deg = len(next(iter(terms)))
    return AlternatingForm.from_dict(dim, deg, terms)


@st.composite
def forms(draw, dim, degree):
    return AlternatingForm(dim, degree, la.exact_array(
        [draw(fractions) for _ in range(len(AlternatingForm.zero(dim, degree).coeffs))]))


def test_wedge_evaluation_signs():
    xy = form(4, {(0, 1): 1})
    e = [la.eye(4, True)[:, i] for i in range(4)]
    assert xy(e[0], e[1]) == 1 and xy(e[1], e[0]) == -1
    assert xy(e[0], e[0]) == 0


def test_theta_wedge_omega_heisenberg():
    # z2 ∧ (x∧y - z1∧z2) = x∧y∧z2
    z2 = form(4, {(3,): 1})
    omega = form(4, {(0, 1): 1, (2, 3): -1})
    assert wedge(z2, omega) == form(4, {(0, 1, 3): 1})


@given(forms(4, 1))
def test_one_form_squares_to_zero(a):
    assert (a ^ a).is_zero()


@given(forms(5, 1), forms(5, 2), forms(5, 2))
def test_wedge_associative_and_graded(a, b, c):
    assert (a ^ b) ^ c == a ^ (b ^ c)
    assert a ^ b == b ^ a                 # degrees 1 and 2: sign +1
    assert (a ^ a.compose(la.eye(5, True) * 2)).is_zero()


def test_degree_top_is_one_dimensional():
    assert len(AlternatingForm.zero(6, 6).coeffs) == 1


def test_differential_examples():
    h = cat.heisenberg_algebra(1)
    assert ce_differential(h, form(4, {(2,): 1})) == form(4, {(0, 1): -1})
    g = cat.acfm_solvable().algebra
    assert ce_differential(g, form(4, {(1,): 1})) == form(4, {(0, 1): -1})
    assert ce_differential(g, form(4, {(2,): 1})) == form(4, {(0, 2): 1})
    assert ce_differential(g, form(4, {(3,): 1})) == form(4, {(1, 2): -1})
    flat = cat.flat(4).algebra
    assert ce_differential(flat, form(4, {(0, 1): 3})).is_zero()


def test_differential_on_top_degree_raises():
    with pytest.raises(FormError):
        ce_differential(cat.flat(4).algebra, AlternatingForm.zero(4, 4))


def test_hodge_examples():
    gm = InnerProduct.identity(4)
    assert hodge_star(form(4, {(0, 1): 1}), gm) == form(4, {(2, 3): 1})
    one = AlternatingForm(4, 0, la.exact_array([1]))
    assert hodge_star(one, gm) == volume_form(gm)
    assert hodge_star(volume_form(gm), gm) == one


@pytest.mark.parametrize("lam", [Fraction(1), Fraction(4), Fraction(1, 9)])
def test_hodge_star_of_z2_in_lambda_metric(lam):
    # |z2|^2 = λ and vol = e1234/λ, so the λ factors cancel
    gm = cat.heisenberg_family(1, lam).metric
    z2 = form(4, {(3,): 1})
    star = hodge_star(z2, gm)
    assert star == form(4, {(0, 1, 2): -1})
    assert wedge(z2, star) == volume_form(gm) * form_inner(z2, z2, gm)


def test_irrational_volume_falls_back_to_float():
    gm = InnerProduct.from_matrix([[2, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]])
    star = hodge_star(form(4, {(0,): 1}), gm)
    assert not star.exact
    assert np.isclose(star[(1, 2, 3)], 2 ** -0.5)


@given(st.integers(0, 4), rational_spd(4), st.data())
def test_star_star_sign(k, g, data):
    a = data.draw(forms(4, k))
    gm = InnerProduct(g)
    assert hodge_star(hodge_star(a, gm), gm) == a * ((-1) ** (k * (4 - k)))


@given(st.integers(0, 4), rational_spd(4), st.data())
def test_inner_product_identity(k, g, data):
    a, b = data.draw(forms(4, k)), data.draw(forms(4, k))
    gm = InnerProduct(g)
    assert wedge(b, hodge_star(a, gm)) == volume_form(gm) * form_inner(b, a, gm)


def test_codifferential_examples():
    flat = cat.flat(4)
    a = form(4, {(0,): 1, (2,): 5})
    assert codifferential(flat.algebra, flat.metric, a).is_zero()
    h = cat.heisenberg_family(1, 1)
    assert codifferential(h.algebra, h.metric, form(4, {(3,): 1})).is_zero()


def test_lee_form_examples():
    h = cat.heisenberg_family(1, 1)
    assert lee_form(h.algebra, h.metric, h.J) == form(4, {(3,): 1})
    a = cat.acfm_solvable()
    assert lee_form(a.algebra, a.metric, a.J) == form(4, {(0,): -1})
    f = cat.flat(4)
    assert lee_form(f.algebra, f.metric, f.J).is_zero()


def test_lee_form_orientation_independent():
    a = cat.acfm_solvable()
    omega = fundamental_form(a.J, a.metric)
    d1 = codifferential(a.algebra, a.metric, omega, orientation=1)
    d2 = codifferential(a.algebra, a.metric, omega, orientation=-1)
    assert d1 == d2


def test_fundamental_forms():
    assert fundamental_form(cat.heisenberg_family(1, 1).J, cat.heisenberg_family(1, 1).metric) \
        == form(4, {(0, 1): 1, (2, 3): -1})
    a = cat.acfm_solvable()
    assert fundamental_form(a.J, a.metric) == form(4, {(0, 2): 1, (3, 1): 1})
    h = cat.heisenberg_family(2, 3)
    assert fundamental_form(h.J, h.metric) == form(6, {(0, 2): 1, (1, 3): 1, (4, 5): Fraction(-1, 3)})


def test_metric_validation():
    with pytest.raises(MetricError):
        InnerProduct.from_matrix([[1, 2], [2, 1]])
    with pytest.raises(MetricError):
        InnerProduct.from_matrix([[1, 1], [0, 1]])


def test_float_forms_compare_with_tolerance():
    a = form(4, {(0, 1): 1}).to_float()
    b = AlternatingForm(4, 2, a.coeffs + 1e-12)
    assert a.close_to(b)
    assert not a.close_to(AlternatingForm(4, 2, a.coeffs + 1e-6))


def test_format():
    h = cat.acfm_solvable().algebra
    om = form(4, {(0, 2): 1, (3, 1): Fraction(-1, 2)})
    assert om.format(h.dual_labels) == "alpha^y + 1/2*x^z"
    assert AlternatingForm.zero(4, 1).format() == "0"
