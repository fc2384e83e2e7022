from itertools import combinations
from math import factorial

import pytest
from hypothesis import assume, given, strategies as st

from coxhom.coxeter import (INF, CoxeterError, CoxeterMatrix, ParseError, TypeDecomposition, catalog,
                            decompose, group_order, has_p_torsion, is_aspherical, is_p_free,
                            odd_graph_components, parse_coxeter, restrict)

FINITE_NAMES = ["A1", "A2", "A3", "A4", "A5", "A6", "A7", "B2", "B3", "B4", "B5", "B6", "D4", "D5", "D6",
                "D7", "E6", "E7", "E8", "F4", "H3", "H4", "I2(5)", "I2(7)", "I2(12)"]


def test_parse_examples():
    m = parse_coxeter("2\n0 1 3\n")
    assert m[0, 1] == 3 and decompose(m).label == "A2"
    m = parse_coxeter("2\n0 1 inf\n")
    assert m[0, 1] is INF and not decompose(m).finite
    m = parse_coxeter("3\n0 1 3\n1 2 5\n")
    assert m[0, 2] == 2 and decompose(m).label == "H3"
    assert group_order(m).value == 120


def test_parse_comments_and_duplicates():
    m = parse_coxeter("# H3\n3\n0 1 5  # first edge\n1 0 5\n1 2 3\n")
    assert m == catalog("H3")


@pytest.mark.parametrize("text, line", [
    ("2\n0 1\n", 2),
    ("2\n0 2 3\n", 2),
    ("2\n0 1 1\n", 2),
    ("3\n0 1 3\n1 2 3\n0 1 4\n", 4),
    ("x\n", 1),
    ("2\n0 1 three\n", 2),
])
def test_parse_errors_carry_line_numbers(text, line):
    with pytest.raises(ParseError) as exc:
        parse_coxeter(text)
    assert exc.value.line == line


def test_infinity_is_not_a_number():
    assert INF > 10 ** 9 and INF != 0
    with pytest.raises(TypeError):
        INF + 1


@pytest.mark.parametrize("bad", ["D3", "E9", "H5", "F5", "I2(2)", "X4", ""])
def test_catalog_rejects(bad):
    with pytest.raises(CoxeterError):
        catalog(bad)


def test_catalog_shapes():
    assert [e for e in catalog("A3").edges()] == [(0, 1, 3), (1, 2, 3)]
    assert sorted(lab for _, _, lab in catalog("B4").edges()) == [3, 3, 4]
    assert sorted(lab for _, _, lab in catalog("H4").edges()) == [3, 3, 5]
    assert sorted(lab for _, _, lab in catalog("F4").edges()) == [3, 3, 4]
    assert catalog("I2(7)").edges() == [(0, 1, 7)]
    m = catalog("B3xA1")
    assert m.n == 4 and all(m[3, s] == 2 for s in range(3))


@pytest.mark.parametrize("name", FINITE_NAMES)
def test_decompose_recovers_catalog_type(name):
    assert decompose(catalog(name)).label == name


def test_rank_two_overlaps_report_A2_and_B2():
    assert decompose(catalog("I2(3)")).label == "A2"
    assert decompose(catalog("I2(4)")).label == "B2"
    assert decompose(catalog("I2(6)")).label == "I2(6)"


def test_infinite_components():
    tri = CoxeterMatrix.from_edges(3, [(0, 1, 3), (1, 2, 3), (0, 2, 3)])
    d = decompose(tri)
    assert not d.finite and group_order(tri).infinite
    affine_b3 = CoxeterMatrix.from_edges(4, [(0, 1, 4), (1, 2, 3), (2, 3, 4)])
    assert not decompose(affine_b3).finite
    d = decompose(catalog("B3xA1"))
    assert [c.type.label for c in d.components] == ["B3", "A1"]


def test_orders():
    assert group_order(catalog("E6")).format_factors() == "2^7·3^4·5"
    assert group_order(catalog("A1")).value == 2
    o = group_order(catalog("A4xI2(5)"))
    assert o.value == 1200 and o.format_factors() == "2^4·3·5^2"
    for n in range(1, 8):
        assert group_order(catalog(f"A{n}")).value == factorial(n + 1)


def test_p_freeness():
    assert is_p_free(catalog("A4"), 5)
    assert not is_p_free(catalog("I2(15)"), 5)
    assert is_p_free(parse_coxeter("2\n0 1 inf\n"), 3)
    with pytest.raises(ValueError):
        is_p_free(catalog("A2"), 2)
    with pytest.raises(ValueError):
        is_p_free(catalog("A2"), 9)


def test_asphericity():
    pentagon = CoxeterMatrix.from_edges(5, [(i, (i + 1) % 5, 5) for i in range(5)])
    # {0, 1, 3} carries labels 5, 2, 2: a finite parabolic, so not aspherical
    assert not is_aspherical(pentagon)
    k5 = CoxeterMatrix.from_edges(5, [(i, j, 5 if (j - i) in (1, 4) else INF)
                                      for i, j in combinations(range(5), 2)])
    assert is_aspherical(k5)
    assert is_aspherical(catalog("I2(7)"))
    assert not is_aspherical(catalog("A3"))


def test_odd_graph_components():
    assert odd_graph_components(catalog("A4")) == 1
    assert odd_graph_components(catalog("B3")) == 2
    assert odd_graph_components(catalog("A1xA1xA1")) == 3
    assert odd_graph_components(catalog("F4")) == 2


def test_three_torsion_absent_on_3_free_groups():
    for name in ["A1", "B2", "I2(4)", "I2(8)", "A1xB2", "I2(5)", "I2(7)xA1"]:
        m = catalog(name)
        assert is_p_free(m, 3) and not has_p_torsion(m, 3)
    assert has_p_torsion(catalog("A2"), 3)


def test_json_round_trip():
    for name in ["E6", "B3xA1", "I2(9)"]:
        m = catalog(name)
        assert CoxeterMatrix.from_json(m.to_json()) == m
        d = decompose(m)
        assert TypeDecomposition.from_json(d.to_json()) == d
        assert parse_coxeter(m.to_text()) == m


# -- properties

labels = st.sampled_from([2, 2, 2, 3, 3, 4, 5, 6, INF])


@st.composite
def coxeter_matrices(draw, max_n=5):
    n = draw(st.integers(1, max_n))
    edges = [(s, t, draw(labels)) for s, t in combinations(range(n), 2)]
    return CoxeterMatrix.from_edges(n, edges)


@given(coxeter_matrices())
def test_text_round_trip(m):
    assert parse_coxeter(m.to_text()) == m


@given(coxeter_matrices(), st.data())
def test_finite_order_divisible_by_parabolic_orders(m, data):
    o = group_order(m)
    T = data.draw(st.sets(st.integers(0, m.n - 1)))
    sub, idx = restrict(m, T)
    assert idx == tuple(sorted(T))
    oT = group_order(sub)
    if not o.infinite:
        assert not oT.infinite and o.value % oT.value == 0


@given(st.lists(st.sampled_from(FINITE_NAMES[:16] + ["I2(5)", "I2(8)"]), min_size=1, max_size=3))
def test_decompose_of_catalog_product(parts):
    assume(sum(catalog(part).n for part in parts) <= 16)
    name = "x".join(parts)
    d = decompose(catalog(name))
    assert sorted(c.type.label for c in d.components) == sorted(parts)
    expected = 1
    for part in parts:
        expected *= group_order(catalog(part)).value
    assert group_order(catalog(name)).value == expected


@given(coxeter_matrices(max_n=4))
def test_p_torsion_matches_finite_subgroup_orders(m):
    # direct definition: some finite parabolic has order divisible by p
    for p in (3, 5):
        direct = any(not group_order(m.restrict(T)).infinite and group_order(m.restrict(T)).value % p == 0
                     for k in range(1, m.n + 1) for T in combinations(range(m.n), k))
        assert has_p_torsion(m, p) == direct
