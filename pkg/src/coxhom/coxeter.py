"""Coxeter matrices, the finite-type classification, orders and predicates.

A Coxeter system is stored as a symmetric matrix of labels ``m(s, t)``
with ``m(s, s) = 1`` and off-diagonal labels in ``{2, 3, ...} | {INF}``.
Generators are the integers ``0 .. n-1``.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from math import factorial, prod
from typing import Iterable, Sequence

from sympy import factorint, isprime

MAX_RANK = 16
SUBSET_SCAN_BOUND = 16


class _Infinity:
    """Label of a pair of generators whose product has infinite order.

    Compares greater than every integer but supports no arithmetic, so a
    stray ``m + 1`` on an infinite label fails loudly.
    """

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INF"

    def __str__(self):
        return "inf"

    def __reduce__(self):
        return (_Infinity, ())

    def __hash__(self):
        return hash("coxhom.INF")

    def __eq__(self, other):
        return other is self

    def __gt__(self, other):
        return other is not self

    def __ge__(self, other):
        return True

    def __lt__(self, other):
        return False

    def __le__(self, other):
        return other is self


INF = _Infinity()


class CoxeterError(ValueError):
    pass


class ParseError(CoxeterError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


def check_odd_prime(p):
    if not isinstance(p, int) or p < 3 or not isprime(p):
        raise CoxeterError(f"{p!r} is not an odd prime")
    return p


@dataclass(frozen=True)
class CoxeterMatrix:
    n: int
    entries: tuple

    def __post_init__(self):
        if not 0 <= self.n <= MAX_RANK:
            raise CoxeterError(f"rank {self.n} outside 0..{MAX_RANK}")
        rows = tuple(tuple(r) for r in self.entries)
        if len(rows) != self.n or any(len(r) != self.n for r in rows):
            raise CoxeterError("entries must be an n x n array")
        for s in range(self.n):
            if rows[s][s] != 1:
                raise CoxeterError(f"m({s},{s}) must be 1")
            for t in range(s + 1, self.n):
                a, b = rows[s][t], rows[t][s]
                if a != b:
                    raise CoxeterError(f"m({s},{t}) != m({t},{s})")
                if a is not INF and (not isinstance(a, int) or a < 2):
                    raise CoxeterError(f"m({s},{t}) = {a!r} must be >= 2 or INF")
        object.__setattr__(self, "entries", rows)

    @classmethod
    def from_edges(cls, n, edges: Iterable[tuple]):
        """Matrix with the given ``(s, t, m)`` labels and 2 elsewhere."""
        rows = [[1 if s == t else 2 for t in range(n)] for s in range(n)]
        for s, t, m in edges:
            rows[s][t] = rows[t][s] = m
        return cls(n, tuple(tuple(r) for r in rows))

    def __getitem__(self, st):
        s, t = st
        return self.entries[s][t]

    @property
    def rank(self):
        return self.n

    def labels(self):
        """Off-diagonal ``(s, t, m)`` triples with ``s < t``."""
        for s, t in combinations(range(self.n), 2):
            yield s, t, self.entries[s][t]

    def edges(self):
        """Coxeter-graph edges, i.e. pairs with label >= 3 (INF included)."""
        return [(s, t, m) for s, t, m in self.labels() if m >= 3]

    def restrict(self, T: Iterable[int]) -> "CoxeterMatrix":
        idx = sorted(set(T))
        return CoxeterMatrix(len(idx), tuple(tuple(self.entries[a][b] for b in idx) for a in idx))

    def to_json(self):
        return {
            "n": self.n,
            "entries": [[("inf" if v is INF else v) for v in row] for row in self.entries],
        }

    @classmethod
    def from_json(cls, obj):
        rows = [[(INF if v == "inf" else int(v)) for v in row] for row in obj["entries"]]
        return cls(int(obj["n"]), tuple(tuple(r) for r in rows))

    def to_text(self):
        lines = [str(self.n)]
        for s, t, m in self.labels():
            if m != 2:
                lines.append(f"{s} {t} {m}")
        return "\n".join(lines) + "\n"


def restrict(m: CoxeterMatrix, T: Iterable[int]):
    """Return ``(submatrix, parent_index)``; ``parent_index[i]`` is the
    generator of ``m`` that became generator ``i`` of the submatrix."""
    idx = tuple(sorted(set(T)))
    if any(not 0 <= i < m.n for i in idx):
        raise CoxeterError(f"parabolic subset {idx} not inside 0..{m.n - 1}")
    return m.restrict(idx), idx


# --------------------------------------------------------------------------
# text format

def parse_coxeter(text: str, max_rank: int = MAX_RANK) -> CoxeterMatrix:
    """Parse the plain graph format: a vertex-count line, then ``s t m`` lines.

    ``m`` may be ``inf``; ``#`` starts a comment; unlisted pairs get label 2.
    """
    n = None
    labels = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        if n is None:
            if len(fields) != 1 or not fields[0].isdigit():
                raise ParseError("expected the generator count", lineno)
            n = int(fields[0])
            if not 1 <= n <= max_rank:
                raise ParseError(f"generator count {n} outside 1..{max_rank}", lineno)
            continue
        if len(fields) != 3:
            raise ParseError(f"expected 's t m', got {line!r}", lineno)
        try:
            s, t = int(fields[0]), int(fields[1])
        except ValueError:
            raise ParseError(f"bad generator index in {line!r}", lineno) from None
        if not (0 <= s < n and 0 <= t < n):
            raise ParseError(f"index out of range 0..{n - 1}", lineno)
        if s == t:
            raise ParseError("diagonal entries are fixed to 1", lineno)
        tok = fields[2].lower()
        if tok in ("inf", "infinity", "∞"):
            val = INF
        else:
            try:
                val = int(tok)
            except ValueError:
                raise ParseError(f"bad label {fields[2]!r}", lineno) from None
            if val < 2:
                raise ParseError(f"label {val} < 2", lineno)
        key = (min(s, t), max(s, t))
        if key in labels and labels[key] != val:
            raise ParseError(f"contradictory labels for pair {key}", lineno)
        labels[key] = val
    if n is None:
        raise ParseError("empty input")
    return CoxeterMatrix.from_edges(n, [(s, t, v) for (s, t), v in labels.items()])


# --------------------------------------------------------------------------
# catalog

_FAMILY_MIN = {"A": 1, "B": 2, "D": 4}
_EXCEPTIONAL = {("E", 6), ("E", 7), ("E", 8), ("F", 4), ("H", 3), ("H", 4)}
_NAME_RE = re.compile(r"^(?:([ABDEFH])_?(\d+)|I_?2\((\d+)\))$")


def _irreducible_edges(family, n, q=None):
    if family == "I":
        return 2, [(0, 1, q)]
    path = [(i, i + 1, 3) for i in range(n - 1)]
    if family == "A":
        return n, path
    if family == "B":
        path[-1] = (n - 2, n - 1, 4)
        return n, path
    if family == "D":
        return n, [(i, i + 1, 3) for i in range(n - 2)] + [(n - 3, n - 1, 3)]
    if family == "E":
        return n, [(i, i + 1, 3) for i in range(n - 2)] + [(2, n - 1, 3)]
    if family == "F":
        return 4, [(0, 1, 3), (1, 2, 4), (2, 3, 3)]
    if family == "H":
        path[0] = (0, 1, 5)
        return n, path
    raise CoxeterError(f"unknown family {family}")


def _catalog_factor(name):
    mt = _NAME_RE.match(name.strip())
    if not mt:
        raise CoxeterError(f"unknown Coxeter type {name!r}")
    if mt.group(3) is not None:
        q = int(mt.group(3))
        if q < 3:
            raise CoxeterError(f"I2({q}) needs q >= 3")
        return _irreducible_edges("I", 2, q)
    family, n = mt.group(1), int(mt.group(2))
    if family in _FAMILY_MIN:
        if n < _FAMILY_MIN[family]:
            raise CoxeterError(f"{family}{n}: subscript must be >= {_FAMILY_MIN[family]}")
    elif (family, n) not in _EXCEPTIONAL:
        raise CoxeterError(f"no exceptional type {family}{n}")
    return _irreducible_edges(family, n)


def catalog(name: str) -> CoxeterMatrix:
    """Standard Coxeter matrix of a type label such as ``E6``, ``I2(7)``
    or a product ``B3xA1`` (``×`` also accepted)."""
    parts = [p for p in re.split(r"[x×]", name.strip()) if p.strip()]
    if not parts:
        raise CoxeterError("empty type label")
    edges, offset = [], 0
    for part in parts:
        k, es = _catalog_factor(part)
        edges += [(s + offset, t + offset, m) for s, t, m in es]
        offset += k
    if offset > MAX_RANK:
        raise CoxeterError(f"rank {offset} exceeds {MAX_RANK}")
    return CoxeterMatrix.from_edges(offset, edges)


# --------------------------------------------------------------------------
# classification

@dataclass(frozen=True, order=True)
class IrredType:
    family: str  # A B D E F H I, or "inf" for an infinite component
    rank: int
    q: int = 0  # dihedral label, only for family I

    @property
    def finite(self):
        return self.family != "inf"

    @property
    def label(self):
        if self.family == "I":
            return f"I2({self.q})"
        if self.family == "inf":
            return f"Inf{self.rank}"
        return f"{self.family}{self.rank}"

    def __str__(self):
        return self.label

    def order(self) -> int | None:
        f, n = self.family, self.rank
        if f == "A":
            return factorial(n + 1)
        if f == "B":
            return 2 ** n * factorial(n)
        if f == "D":
            return 2 ** (n - 1) * factorial(n)
        if f == "I":
            return 2 * self.q
        if f == "inf":
            return None
        return {("E", 6): 51840, ("E", 7): 2903040, ("E", 8): 696729600,
                ("F", 4): 1152, ("H", 3): 120, ("H", 4): 14400}[(f, n)]


@dataclass(frozen=True)
class Component:
    type: IrredType
    generators: tuple


@dataclass(frozen=True)
class TypeDecomposition:
    rank: int
    components: tuple

    @property
    def finite(self):
        return all(c.type.finite for c in self.components)

    @property
    def types(self):
        return [c.type for c in self.components]

    @property
    def label(self):
        if not self.components:
            return "1"
        return "×".join(c.type.label for c in self.components)

    def to_json(self):
        return {
            "rank": self.rank,
            "components": [
                {"type": c.type.label, "family": c.type.family, "rank": c.type.rank,
                 "generators": list(c.generators)}
                for c in self.components
            ],
        }

    @classmethod
    def from_json(cls, obj):
        comps = []
        for c in obj["components"]:
            q = 0
            if c["family"] == "I":
                q = int(re.match(r"I2\((\d+)\)", c["type"]).group(1))
            comps.append(Component(IrredType(c["family"], int(c["rank"]), q), tuple(c["generators"])))
        return cls(int(obj["rank"]), tuple(comps))


def _connected_components(n, pairs):
    parent = list(range(n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for s, t in pairs:
        ra, rb = find(s), find(t)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)
    groups = {}
    for v in range(n):
        groups.setdefault(find(v), []).append(v)
    return [tuple(g) for g in sorted(groups.values())]


def _recognize(m: CoxeterMatrix, verts: Sequence[int]) -> IrredType:
    k = len(verts)
    infinite = IrredType("inf", k)
    if k == 1:
        return IrredType("A", 1)
    adj = {v: {} for v in verts}
    for a, b in combinations(verts, 2):
        lab = m[a, b]
        if lab >= 3:
            if lab is INF:
                return infinite
            adj[a][b] = lab
            adj[b][a] = lab
    n_edges = sum(len(x) for x in adj.values()) // 2
    if n_edges != k - 1:  # connected, so a tree iff k-1 edges
        return infinite
    degrees = {v: len(adj[v]) for v in verts}
    branch = [v for v in verts if degrees[v] >= 3]
    if k == 2:
        q = next(iter(adj[verts[0]].values()))
        if q == 3:
            return IrredType("A", 2)
        if q == 4:
            return IrredType("B", 2)
        return IrredType("I", 2, q)
    if not branch:
        ends = [v for v in verts if degrees[v] == 1]
        walk, prev, cur = [], None, ends[0]
        while True:
            nxt = [u for u in adj[cur] if u != prev]
            if not nxt:
                break
            walk.append(adj[cur][nxt[0]])
            prev, cur = cur, nxt[0]
        if all(x == 3 for x in walk):
            return IrredType("A", k)
        big = [i for i, x in enumerate(walk) if x != 3]
        if len(big) != 1:
            return infinite
        i, lab = big[0], walk[big[0]]
        at_end = i in (0, len(walk) - 1)
        if lab == 4 and at_end:
            return IrredType("B", k)
        if lab == 4 and k == 4 and i == 1:
            return IrredType("F", 4)
        if lab == 5 and at_end and k in (3, 4):
            return IrredType("H", k)
        return infinite
    if len(branch) != 1 or degrees[branch[0]] != 3:
        return infinite
    if any(lab != 3 for nb in adj.values() for lab in nb.values()):
        return infinite
    c = branch[0]
    arms = []
    for start in adj[c]:
        length, prev, cur = 1, c, start
        while True:
            nxt = [u for u in adj[cur] if u != prev]
            if not nxt:
                break
            length, prev, cur = length + 1, cur, nxt[0]
        arms.append(length)
    arms.sort()
    if arms[0] == arms[1] == 1:
        return IrredType("D", k)
    if arms[0] == 1 and arms[1] == 2 and arms[2] in (2, 3, 4):
        return IrredType("E", k)
    return infinite


@lru_cache(maxsize=1 << 17)
def decompose(m: CoxeterMatrix) -> TypeDecomposition:
    """Split the Coxeter graph into connected components and name each one."""
    comps = _connected_components(m.n, [(s, t) for s, t, _ in m.edges()])
    return TypeDecomposition(m.n, tuple(Component(_recognize(m, c), c) for c in comps))


# --------------------------------------------------------------------------
# orders

@dataclass(frozen=True)
class FactoredOrder:
    value: int | None  # None means infinite
    factors: tuple = ()  # sorted (prime, exponent) pairs

    @classmethod
    def of(cls, value: int | None):
        if value is None:
            return cls(None)
        return cls(value, tuple(sorted(factorint(value).items())))

    @property
    def infinite(self):
        return self.value is None

    def valuation(self, p):
        if self.infinite:
            raise CoxeterError("infinite group has no p-adic order")
        return dict(self.factors).get(p, 0)

    def format_factors(self):
        if self.infinite:
            return "∞"
        if self.value == 1:
            return "1"
        return "·".join(f"{q}^{e}" if e > 1 else str(q) for q, e in self.factors)

    def __str__(self):
        return "∞" if self.infinite else str(self.value)


def order(d: TypeDecomposition) -> FactoredOrder:
    orders = [c.type.order() for c in d.components]
    if any(o is None for o in orders):
        return FactoredOrder(None)
    return FactoredOrder.of(prod(orders))


@lru_cache(maxsize=1 << 17)
def group_order(m: CoxeterMatrix) -> FactoredOrder:
    return order(decompose(m))


# --------------------------------------------------------------------------
# predicates

def is_p_free(m: CoxeterMatrix, p: int) -> bool:
    check_odd_prime(p)
    return all(lab is INF or lab % p for _, _, lab in m.labels())


def _recip(lab):
    return Fraction(0) if lab is INF else Fraction(1, lab)


def is_aspherical(m: CoxeterMatrix) -> bool:
    for s, t, u in combinations(range(m.n), 3):
        if _recip(m[s, t]) + _recip(m[t, u]) + _recip(m[u, s]) > 1:
            return False
    return True


def is_finite(m: CoxeterMatrix) -> bool:
    return decompose(m).finite


def has_p_torsion(m: CoxeterMatrix, p: int, bound: int = SUBSET_SCAN_BOUND) -> bool:
    """Whether some finite parabolic subgroup has order divisible by ``p``.

    Every finite subgroup of a Coxeter group is conjugate into a finite
    parabolic, so this decides whether W has p-torsion at all.
    """
    check_odd_prime(p)
    if m.n > bound:
        raise CoxeterError(f"rank {m.n} exceeds the subset-scan bound {bound}")
    for size in range(m.n, 0, -1):
        for T in combinations(range(m.n), size):
            o = group_order(m.restrict(T))
            if not o.infinite and o.valuation(p) > 0:
                return True
    return False


def odd_graph_components(m: CoxeterMatrix) -> int:
    """Number of components of the graph joining s, t when m(s,t) is finite and odd.

    This is the number of Z/2 summands of H_1(W, Z).
    """
    pairs = [(s, t) for s, t, lab in m.labels() if lab is not INF and lab % 2]
    return len(_connected_components(m.n, pairs))


def p_free_primes(m: CoxeterMatrix, primes: Iterable[int]):
    return [p for p in primes if is_p_free(m, p)]


def dumps_decomposition(m: CoxeterMatrix) -> str:
    return json.dumps({"matrix": m.to_json(), "decomposition": decompose(m).to_json()},
                      sort_keys=True)
