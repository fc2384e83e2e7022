from itertools import combinations

import pytest

from coxhom.complex import (ComplexError, boundary_matrices, build_complex, complex_homology, euler_characteristic,
                            export_triplets, fundamental_cycle, fundamental_domain_chain, generator_action_on_top,
                            orbit_chain_complex)
from coxhom.coxeter import catalog, group_order, parse_coxeter
from coxhom.homalg import chain_homology, point_homology, sphere_homology, top_coinvariants

RANK_LE_4 = ["A1", "A2", "A3", "A4", "B2", "B3", "B4", "D4", "F4", "H3", "I2(5)", "I2(6)", "I2(7)",
             "A1xA1", "A2xA1", "B3xA1", "A1xA1xA1"]


def _f_vector_from_orders(m):
    """Number of k-simplices: sum of |W : W_T| over |T| = |S| - k - 1."""
    o = group_order(m).value
    return tuple(sum(o // group_order(m.restrict(T)).value for T in combinations(range(m.n), m.n - k - 1))
                 for k in range(m.n))


@pytest.fixture(scope="module", params=RANK_LE_4)
def built(request):
    m = catalog(request.param)
    return m, build_complex(m)


def test_known_f_vectors():
    assert build_complex(catalog("A3")).f_vector == (14, 36, 24)
    assert build_complex(catalog("I2(6)")).f_vector == (12, 12)
    assert build_complex(catalog("B3")).f_vector == (26, 72, 48)
    assert build_complex(catalog("H3")).f_vector == (62, 180, 120)


def test_f_vector_and_euler(built):
    m, X = built
    assert X.f_vector == _f_vector_from_orders(m)
    assert euler_characteristic(X) == 1 + (-1) ** (m.n - 1)


def test_sphere(built):
    m, X = built
    assert complex_homology(X) == sphere_homology(m.n - 1)


def test_orbit_complex_is_a_point(built):
    m, X = built
    orbit = orbit_chain_complex(X)
    assert chain_homology(orbit) == point_homology(m.n - 1)
    ref = fundamental_domain_chain(m)
    assert [(d.rows, d.cols, d.entries) for d in orbit] == [(d.rows, d.cols, d.entries) for d in ref]


def test_generators_reverse_orientation(built):
    m, X = built
    assert [generator_action_on_top(X, s) for s in range(m.n)] == [-1] * m.n
    for p in (3, 5, 7):
        assert top_coinvariants(X, p).trivial


def test_fundamental_cycle_alternates():
    X = build_complex(catalog("A2"))
    z = fundamental_cycle(X)
    assert len(z) == 6 and sum(z.values()) == 0


def test_boundary_squares_to_zero():
    X = build_complex(catalog("B4"))
    d = boundary_matrices(X)
    for k in range(2, len(d)):
        assert d[k - 1].matmul(d[k]).is_zero()


def test_export_format():
    X = build_complex(catalog("A2"))
    lines = export_triplets(X).splitlines()
    assert lines[0] == "f 6 6"
    entries = [tuple(map(int, line.split())) for line in lines[1:]]
    assert len(entries) == 12 and all(k == 1 and v in (1, -1) for k, _, _, v in entries)


def test_refuses_infinite_and_oversized():
    with pytest.raises(ComplexError):
        build_complex(parse_coxeter("2\n0 1 inf\n"))
    with pytest.raises(ComplexError):
        build_complex(catalog("A5"), max_simplices=100)
