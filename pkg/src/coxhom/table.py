"""The order and p-freeness table of the finite irreducible Coxeter groups.

Every entry is recomputed: orders from the classification (checked
against the closed formulas over a range of ranks for the infinite
families), factorizations with sympy, and the p-freeness range by
testing each odd prime against the Coxeter matrix.
"""
from __future__ import annotations

from importlib import resources
from math import factorial

from sympy import nextprime, primefactors, primerange

from .coxeter import INF, CoxeterMatrix, catalog, decompose, group_order, is_p_free

HEADER = ("Γ", "|W(Γ)|", "factored", "p-freeness")
PRIME_HORIZON = 60
FAMILY_RANKS = range(2, 10)


def _odd_primes():
    return list(primerange(3, PRIME_HORIZON))


def _range_text(free):
    """``p≥q`` for a set of odd primes that is everything from q on."""
    primes = _odd_primes()
    for q in primes:
        if free == [r for r in primes if r >= q]:
            return f"p≥{q}"
    raise ValueError(f"p-free primes {free} are not a final segment")


def _free(ms):
    return [p for p in _odd_primes() if all(is_p_free(m, p) for m in ms)]


def _family(label, formula, name, ranks, order_fn):
    ms = []
    for n in ranks:
        m = catalog(f"{name}{n}")
        if group_order(m).value != order_fn(n):
            raise AssertionError(f"{name}{n}: order disagrees with {formula}")
        ms.append(m)
    return (label, formula, "—", _range_text(_free(ms)))


def _single(label, name, factored=True):
    m = catalog(name)
    o = group_order(m)
    return (label, str(o.value), o.format_factors() if factored else "—", _range_text(_free([m])))


def _dihedral_row():
    for q in range(3, 40):
        m = catalog(f"I2({q})")
        if group_order(m).value != 2 * q:
            raise AssertionError(f"I2({q}) has the wrong order")
        for p in _odd_primes():
            if is_p_free(m, p) != (q % p != 0):
                raise AssertionError(f"I2({q}) at p={p}: p-freeness is not p∤q")
    return ("I_2(q) (q≥3)", "2q", "—", "p∤q")


def table_rows():
    return [
        _single("A_1", "A1", factored=False),
        _family("A_n (n≥2)", "(n+1)!", "A", FAMILY_RANKS, lambda n: factorial(n + 1)),
        _single("B_2", "B2", factored=False),
        _family("B_n (n≥3)", "2^n n!", "B", range(3, 10), lambda n: 2 ** n * factorial(n)),
        _family("D_n (n≥4)", "2^{n-1} n!", "D", range(4, 10), lambda n: 2 ** (n - 1) * factorial(n)),
        _single("E_6", "E6"),
        _single("E_7", "E7"),
        _single("E_8", "E8"),
        _single("F_4", "F4"),
        _single("H_3", "H3"),
        _single("H_4", "H4"),
        _dihedral_row(),
    ]


def render_table(rows=None) -> str:
    rows = table_rows() if rows is None else rows
    return "\n".join(" | ".join(r) for r in [HEADER, *rows]) + "\n"


def golden_table() -> str:
    return resources.files("coxhom").joinpath("data/order_table.txt").read_text(encoding="utf-8")


def p_free_description(m: CoxeterMatrix) -> str:
    """Human-readable set of odd primes p for which W is p-free."""
    bad = sorted({int(q) for _, _, lab in m.labels() if lab is not INF
                  for q in primefactors(lab) if q % 2})
    d = decompose(m)
    if bad:
        cond = f"p≠{bad[0]}" if len(bad) == 1 else "p∉{" + ",".join(map(str, bad)) + "}"
    else:
        cond = "all odd p"
    if len(d.components) == 1 and d.components[0].type.family == "I":
        return f"p∤{d.components[0].type.q} i.e. {cond}"
    # an initial run of odd primes reads as p≥q
    q, run = 3, []
    while q in bad:
        run.append(q)
        q = nextprime(q)
    if run == bad:
        return f"p≥{q}"
    return cond

