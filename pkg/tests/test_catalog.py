import json
from fractions import Fraction

import numpy as np
import pytest

from lck import catalog as cat
from lck.exterior import MetricError
from lck.hermitian import (CompatibilityError, ComplexStructureError, check_lck, classify_J)
from lck.lie import JacobiError, check_jacobi, derived_algebra, is_unimodular

ALL = cat.all_structures()


@pytest.mark.parametrize("h", ALL, ids=lambda h: h.name)
def test_catalog_entries_are_valid(h):
    assert check_jacobi(h.algebra).ok
    assert classify_J(h.algebra, h.J).integrable


@pytest.mark.parametrize("h", ALL, ids=lambda h: h.name)
def test_round_trip(h):
    text = cat.dumps(h)
    back = cat.parse(text)
    assert cat.dumps(back) == text
    assert back.structure() == h


def test_constructor_facts():
    assert check_lck(cat.bi_model(2)).is_lck
    assert classify_J(cat.bi_model(2).algebra, cat.bi_model(2).J).bi_invariant
    assert not is_unimodular(cat.bi_model(1).algebra)[0]
    assert is_unimodular(cat.complex_heisenberg().algebra)[0]
    assert not check_lck(cat.complex_heisenberg()).is_lck
    h = cat.heisenberg_family(1, "2")
    assert h.metric.gmat[3, 3] == Fraction(1, 2)
    assert not cat.heisenberg_family(1, 0.5).exact


def test_associative_catalog_is_associative_and_commutative_mostly():
    algs = cat.associative_catalog()
    assert all(a.is_associative() for a in algs.values())
    assert sum(a.commutative for a in algs.values()) >= 10
    assert not algs["upper2"].commutative


def test_builtin_lookup():
    assert cat.builtin("heisenberg", ["2", "1/4"]).metric.gmat[5, 5] == 4
    assert cat.builtin("aff", ["dual"]).dim == 4
    with pytest.raises(KeyError):
        cat.builtin("nope")
    with pytest.raises(ValueError):
        cat.builtin("heisenberg", ["x"])


def doc(**over):
    base = {"format": cat.FORMAT, "dim": 4,
            "brackets": [[0, 1, 2, "1"]],
            "J": [[0, -1, 0, 0], [1, 0, 0, 0], [0, 0, 0, 1], [0, 0, -1, 0]],
            "metric": [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]]}
    base.update(over)
    return json.dumps(base)


def test_parse_minimal():
    f = cat.parse(doc())
    assert f.exact and check_lck(f.structure()).is_lck


def test_parse_so3_like_algebras():
    so3 = {"format": cat.FORMAT, "dim": 3,
           "brackets": [[0, 1, 2, 1], [1, 2, 0, 1], [0, 2, 1, -1]]}
    f = cat.parse(json.dumps(so3))
    assert f.J is None and check_jacobi(f.algebra).ok
    # [X,Y]=Z, [X,Z]=Y, [Y,Z]=X: the sign change gives so(2,1), still a Lie algebra
    flipped = dict(so3, brackets=[[0, 1, 2, "1"], [0, 2, 1, "1"], [1, 2, 0, "1"]])
    g = cat.parse(json.dumps(flipped)).algebra
    assert check_jacobi(g).ok and derived_algebra(g).shape[1] == 3


def test_jacobi_error_has_witness():
    bad = json.dumps({"format": cat.FORMAT, "dim": 3, "brackets": [[0, 1, 2, 1], [0, 2, 0, 1]]})
    with pytest.raises(JacobiError, match=r"triple \(0, 1, 2\)"):
        cat.parse(bad)


def test_metric_errors():
    with pytest.raises(MetricError, match="positive definite"):
        cat.parse(json.dumps({"format": cat.FORMAT, "dim": 2, "brackets": [],
                              "metric": [[1, 2], [2, 1]]}))
    with pytest.raises(MetricError, match="symmetric"):
        cat.parse(json.dumps({"format": cat.FORMAT, "dim": 2, "brackets": [],
                              "metric": [[1, 1], [0, 1]]}))


def test_complex_structure_errors():
    with pytest.raises(ComplexStructureError):
        cat.parse(doc(J=np.eye(4, dtype=int).tolist()))


def test_compatibility_error():
    with pytest.raises(CompatibilityError):
        cat.parse(doc(metric=[[2, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]]))


@pytest.mark.parametrize("over,where", [
    (dict(extra=1), "extra"),
    (dict(dim=0), "dim"),
    (dict(brackets=[[1, 0, 2, 1]]), "brackets[0]"),
    (dict(brackets=[[0, 1, 2, 1], [0, 1, 2, 2]]), "brackets[1]"),
    (dict(brackets=[[0, 1, 7, 1]]), "brackets[0][2]"),
    (dict(brackets=[[0, 1, 2, "a/b"]]), "brackets[0][3]"),
    (dict(J=[[0, 1], [1, 0]]), "J"),
    (dict(orientation=2), "orientation"),
    (dict(labels=["a"]), "labels"),
])
def test_parse_error_locations(over, where):
    with pytest.raises(cat.ParseError) as info:
        cat.parse(doc(**over))
    assert info.value.location == where


def test_json_syntax_error_location():
    with pytest.raises(cat.ParseError) as info:
        cat.parse('{\n  "dim": 4,\n  oops\n}', source="f.json")
    assert info.value.location == "f.json:3:3"


def test_float_inputs_select_float_backend():
    f = cat.parse(doc(brackets=[[0, 1, 2, 1.0]]))
    assert not f.exact
    with pytest.raises(cat.ParseError, match="exact"):
        cat.parse(doc(brackets=[[0, 1, 2, 0.5]]), force_exact=True)
    # decimal strings count as floats too
    assert not cat.parse(doc(brackets=[[0, 1, 2, "0.5"]])).exact


def test_save_and_load(tmp_path):
    h = cat.acfm_solvable()
    path = tmp_path / "acfm.json"
    cat.save(h, path)
    assert cat.load(path).structure() == h


def test_dumps_writes_exact_entries_as_strings():
    text = cat.dumps(cat.heisenberg_family(1, 2))
    data = json.loads(text)
    assert data["metric"][3][3] == "1/2"
    assert data["brackets"] == [[0, 1, 2, "1"]]
