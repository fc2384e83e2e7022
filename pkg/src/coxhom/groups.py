"""Concrete finite Coxeter groups: coset tables, permutation actions,
element stores and cyclic Sylow subgroups with their normalizer action.

Coset tables are right actions: row ``r`` is a right coset ``W_T w`` and
``table.action[s][r]`` is the row of ``W_T w s``.  Permutations are numpy
arrays ``g`` with ``g[x]`` the image of point ``x``; products compose left
to right, ``(g h)[x] = h[g[x]]``.
"""
from __future__ import annotations

import io
import json
import os
from dataclasses import dataclass, field
from itertools import combinations
from math import gcd, lcm
from pathlib import Path

import numpy as np

from .coxeter import INF, CoxeterError, CoxeterMatrix, check_odd_prime, decompose, group_order

DEFAULT_MAX_ROWS = 2_000_000
DEFAULT_MAX_ELEMS = 5_000_000
STORE_FORMAT_VERSION = 1


class BudgetExceeded(RuntimeError):
    pass


class SylowNotCyclic(RuntimeError):
    pass


class UnfaithfulRepresentation(RuntimeError):
    pass


# --------------------------------------------------------------------------
# Todd-Coxeter

@dataclass(frozen=True)
class CosetTable:
    rows: int
    action: tuple  # per generator, a tuple of row images
    subgroup: tuple

    def column(self, s):
        return self.action[s]

    def trace(self, row, word):
        for s in word:
            row = self.action[s][row]
        return row


class _Enumerator:
    """HLT coset enumeration for a Coxeter presentation.

    Generators are involutions, so every column is its own inverse and
    each relator is ``(st)^m(s,t)`` for finite labels.  Coincidences are
    processed as soon as they appear; definitions and deductions are
    queued and their consequences scanned (no filling) before moving on.
    """

    def __init__(self, m: CoxeterMatrix, T, max_rows):
        self.ngens = m.n
        self.max_rows = max_rows
        self.table = [[None] * m.n]
        self.parent = [0]
        self.relators = []
        self.by_first = [[] for _ in range(m.n)]
        for s, t, lab in m.labels():
            if lab is INF:
                continue
            for a, b in ((s, t), (t, s)):
                w = (a, b) * lab
                self.by_first[a].append(w)
            self.relators.append((s, t) * lab)
        self.deductions = []
        for t in T:
            self._set(0, t, 0)

    # -- bookkeeping

    def _rep(self, c):
        parent = self.parent
        root = c
        while parent[root] != root:
            root = parent[root]
        while parent[c] != root:
            parent[c], c = root, parent[c]
        return root

    def alive(self, c):
        return self.parent[c] == c

    def _set(self, a, x, b):
        self.table[a][x] = b
        self.table[b][x] = a
        self.deductions.append((a, x))

    def _define(self, c, x):
        if len(self.table) >= self.max_rows:
            raise BudgetExceeded(f"coset enumeration exceeded {self.max_rows} rows")
        d = len(self.table)
        self.table.append([None] * self.ngens)
        self.parent.append(d)
        self._set(c, x, d)
        return d

    def _merge(self, a, b, queue):
        a, b = self._rep(a), self._rep(b)
        if a == b:
            return
        lo, hi = min(a, b), max(a, b)
        self.parent[hi] = lo
        queue.append(hi)

    def _coincidence(self, a, b):
        queue = []
        self._merge(a, b, queue)
        table = self.table
        i = 0
        while i < len(queue):
            g = queue[i]
            i += 1
            for x in range(self.ngens):
                d = table[g][x]
                if d is None:
                    continue
                table[g][x] = None
                if table[d][x] == g:
                    table[d][x] = None
                mu, nu = self._rep(g), self._rep(d)
                if table[mu][x] is not None:
                    self._merge(nu, table[mu][x], queue)
                elif table[nu][x] is not None:
                    self._merge(mu, table[nu][x], queue)
                else:
                    table[mu][x] = nu
                    table[nu][x] = mu
                    self.deductions.append((mu, x))

    # -- relator tracing

    def _scan(self, c, word, fill):
        table = self.table
        f, i = c, 0
        b, j = c, len(word) - 1
        while True:
            while i <= j and table[f][word[i]] is not None:
                f = table[f][word[i]]
                i += 1
            if i > j:
                if f != b:
                    self._coincidence(f, b)
                return
            while j >= i and table[b][word[j]] is not None:
                b = table[b][word[j]]
                j -= 1
            if j < i:
                self._coincidence(f, b)
                return
            if i == j:
                self._set(f, word[i], b)
                return
            if not fill:
                return
            self._define(f, word[i])

    def _process_deductions(self):
        while self.deductions:
            a, x = self.deductions.pop()
            for c in (a, self.table[a][x]):
                if c is None or not self.alive(c):
                    continue
                for w in self.by_first[x]:
                    self._scan(c, w, fill=False)
                    if not self.alive(c):
                        break

    def run(self):
        c = 0
        while c < len(self.table):
            if self.alive(c):
                for w in self.relators:
                    self._scan(c, w, fill=True)
                    self._process_deductions()
                    if not self.alive(c):
                        break
                if self.alive(c):
                    for x in range(self.ngens):
                        if self.table[c][x] is None:
                            self._define(c, x)
                    self._process_deductions()
            c += 1
        return self._standardize()

    def _standardize(self):
        # BFS renumbering from the subgroup coset
        order = {0: 0}
        queue = [0]
        for c in queue:
            for x in range(self.ngens):
                d = self._rep(self.table[c][x])
                if d not in order:
                    order[d] = len(queue)
                    queue.append(d)
        action = []
        for x in range(self.ngens):
            col = [0] * len(queue)
            for c in queue:
                col[order[c]] = order[self._rep(self.table[c][x])]
            action.append(tuple(col))
        return action, len(queue)


def coset_enumerate(m: CoxeterMatrix, T=(), max_rows: int = DEFAULT_MAX_ROWS) -> CosetTable:
    """Coset table of ``W / W_T`` with rows numbered in BFS order."""
    T = tuple(sorted(set(T)))
    if any(not 0 <= t < m.n for t in T):
        raise CoxeterError(f"subset {T} not inside 0..{m.n - 1}")
    if m.n == 0:
        return CosetTable(1, (), ())
    action, rows = _Enumerator(m, T, max_rows).run()
    return CosetTable(rows, tuple(action), T)


# --------------------------------------------------------------------------
# permutation representations and element stores

@dataclass(frozen=True)
class PermRep:
    degree: int
    gens: tuple  # numpy arrays, one per Coxeter generator
    subgroup: tuple = ()

    def dtype(self):
        return np.uint8 if self.degree <= 256 else np.uint16 if self.degree <= 65536 else np.uint32


def perm_rep(m: CoxeterMatrix, T=(), max_rows: int = DEFAULT_MAX_ROWS) -> PermRep:
    table = coset_enumerate(m, T, max_rows)
    return _rep_from_table(table)


def _rep_from_table(table):
    dtype = np.uint8 if table.rows <= 256 else np.uint16 if table.rows <= 65536 else np.uint32
    gens = tuple(np.asarray(col, dtype=dtype) for col in table.action)
    return PermRep(table.rows, gens, table.subgroup)


@dataclass
class ElementStore:
    degree: int
    elements: np.ndarray  # shape (N, degree); row 0 is the identity
    lengths: np.ndarray  # BFS word length per element
    label: str = ""
    subgroup: tuple = ()

    def __len__(self):
        return len(self.elements)


def _void_view(a):
    a = np.ascontiguousarray(a)
    return a.view(np.dtype((np.void, a.dtype.itemsize * a.shape[1]))).ravel()


def enumerate_elements(rep: PermRep, max_elems: int = DEFAULT_MAX_ELEMS, label: str = "") -> ElementStore:
    """All products of the generators, layer by layer in word length.

    Each layer is deduplicated by sorting, so element order is a pure
    function of the representation.
    """
    dtype = rep.dtype()
    ident = np.arange(rep.degree, dtype=dtype)[None, :]
    layers = [ident]
    prev = np.empty((0, rep.degree), dtype=dtype)
    cur = ident
    total = 1
    while len(cur):
        cand = np.concatenate([g[cur] for g in rep.gens]) if rep.gens else cur[:0]
        if not len(cand):
            break
        known = np.concatenate([prev, cur])
        combined = np.concatenate([known, cand])
        _, first = np.unique(_void_view(combined), return_index=True)
        new_idx = np.sort(first[first >= len(known)])
        new = combined[new_idx]
        # sort the new layer lexicographically for a canonical order
        new = new[np.argsort(_void_view(new), kind="stable")]
        total += len(new)
        if total > max_elems:
            raise BudgetExceeded(f"element enumeration exceeded {max_elems} elements")
        if len(new):
            layers.append(new)
        prev, cur = cur, new
    elements = np.concatenate(layers)
    lengths = np.concatenate([np.full(len(layer), k, dtype=np.int32) for k, layer in enumerate(layers)])
    return ElementStore(rep.degree, elements, lengths, label, rep.subgroup)


def faithful_candidates(m: CoxeterMatrix):
    """Proper parabolic subsets T for which W acting on W/W_T can be faithful,
    sorted by index |W : W_T| (then lexicographically).

    A T containing a whole irreducible component puts that component in
    the kernel, so those are skipped.
    """
    comps = [set(c.generators) for c in decompose(m).components]
    total = group_order(m).value
    cands = []
    for size in range(m.n - 1, -1, -1):
        for T in combinations(range(m.n), size):
            if any(c <= set(T) for c in comps):
                continue
            cands.append((total // group_order(m.restrict(T)).value, T))
    cands.sort()
    return cands


def _cache_path(label, T):
    root = os.environ.get("COXHOM_CACHE_DIR")
    if not root or not label:
        return None
    safe = label.replace("×", "x").replace("(", "_").replace(")", "")
    return Path(root) / f"{safe}__{'-'.join(map(str, T)) or 'e'}.npz"


def save_store(store: ElementStore, path):
    header = json.dumps({"version": STORE_FORMAT_VERSION, "label": store.label,
                         "subgroup": list(store.subgroup), "degree": store.degree})
    buf = io.BytesIO()
    np.savez_compressed(buf, header=np.frombuffer(header.encode(), dtype=np.uint8),
                        elements=store.elements, lengths=store.lengths)
    Path(path).write_bytes(buf.getvalue())


def load_store(path) -> ElementStore:
    with np.load(path) as data:
        header = json.loads(bytes(data["header"]).decode())
        if header.get("version") != STORE_FORMAT_VERSION:
            raise ValueError(f"store cache {path} has format {header.get('version')}")
        return ElementStore(header["degree"], data["elements"], data["lengths"],
                            header["label"], tuple(header["subgroup"]))


def group_store(m: CoxeterMatrix, max_elems: int = DEFAULT_MAX_ELEMS, label: str = "") -> ElementStore:
    """Enumerate W through its smallest faithful coset action.

    Candidates are tried in order of index; a candidate is accepted once
    the enumerated element count equals the order from the classification.
    """
    o = group_order(m)
    if o.infinite:
        raise CoxeterError("cannot enumerate an infinite Coxeter group")
    if o.value > max_elems:
        raise BudgetExceeded(f"|W| = {o.value} exceeds the element budget {max_elems}")
    if m.n == 0:
        return ElementStore(1, np.zeros((1, 1), dtype=np.uint8), np.zeros(1, dtype=np.int32), label)
    for _, T in faithful_candidates(m):
        path = _cache_path(label, T)
        if path is not None and path.exists():
            store = load_store(path)
            if len(store) == o.value:
                return store
        store = enumerate_elements(perm_rep(m, T), max_elems, label)
        if len(store) == o.value:
            if path is not None:
                path.parent.mkdir(parents=True, exist_ok=True)
                save_store(store, path)
            return store
    raise UnfaithfulRepresentation(f"no faithful parabolic coset action found for {label or m}")


# --------------------------------------------------------------------------
# cyclic Sylow subgroups

@dataclass(frozen=True)
class CyclicSylow:
    p: int
    a: int
    generator: tuple  # permutation of order p^a
    e: int  # order of the normalizer's image in Aut(<x>)
    exponents: tuple = field(default=())  # the conjugation exponents d found

    @property
    def order(self):
        return self.p ** self.a


def _compose_rows(g, h):
    """Row-wise product g h (apply g, then h)."""
    return np.take_along_axis(h, g.astype(np.intp), axis=1)


BLOCK = 1 << 16


def _orders_block(elems, limit):
    ident = np.arange(elems.shape[1], dtype=np.intp)
    orders = np.zeros(len(elems), dtype=np.int64)
    power = elems.copy()
    k = 1
    while True:
        hit = (orders == 0) & (power == ident).all(axis=1)
        orders[hit] = k
        if (orders > 0).all():
            return orders
        k += 1
        if k > limit:
            raise RuntimeError("element order scan exceeded its limit")
        power = np.take_along_axis(elems, power, axis=1)  # power <- power * g


def element_orders(store: ElementStore, limit: int = 10_000) -> np.ndarray:
    out = [_orders_block(store.elements[i:i + BLOCK].astype(np.intp), limit)
           for i in range(0, len(store), BLOCK)]
    return np.concatenate(out) if out else np.zeros(0, dtype=np.int64)


def _perm_power(g, k):
    out = np.arange(len(g), dtype=np.intp)
    base = g.astype(np.intp)
    while k:
        if k & 1:
            out = base[out]
        base = base[base]
        k >>= 1
    return out


def _conjugation_exponents(store, x, p, pa):
    powers = [np.arange(store.degree, dtype=np.intp)]
    for _ in range(pa - 1):
        powers.append(x[powers[-1]])
    units = [d for d in range(1, pa) if gcd(d, p) == 1]
    found = set()
    for i in range(0, len(store), BLOCK):
        elems = store.elements[i:i + BLOCK].astype(np.intp)
        inv = np.empty_like(elems)
        np.put_along_axis(inv, elems, np.broadcast_to(np.arange(store.degree), elems.shape).copy(), axis=1)
        # g^-1 x g as rows: apply g^-1, then x, then g
        conj = np.take_along_axis(elems, x[inv], axis=1)
        for d in units:
            if d not in found and (conj == powers[d]).all(axis=1).any():
                found.add(d)
    return found


def find_cyclic_sylow(store: ElementStore, p: int, group_size: int | None = None) -> CyclicSylow:
    """Cyclic Sylow p-subgroup <x> and the order e of N(<x>) acting on it.

    Scans element orders in store order for the first element whose order
    has full p-part, then tests every element g for g^-1 x g in <x>.  The
    conjugation exponents d (x -> x^d) found this way form the image of
    the normalizer in the unit group mod p^a, and e is its size.
    """
    check_odd_prime(p)
    n = group_size if group_size is not None else len(store)
    a = 0
    while n % p == 0:
        n //= p
        a += 1
    if a == 0:
        raise ValueError(f"{p} does not divide the group order")
    pa = p ** a
    orders = element_orders(store)
    hits = np.nonzero(orders % pa == 0)[0]
    if not len(hits):
        raise SylowNotCyclic(f"no element of order {pa}: the Sylow {p}-subgroup is not cyclic")
    first = int(hits[0])
    x = _perm_power(store.elements[first], int(orders[first]) // pa)
    exps = _conjugation_exponents(store, x, p, pa)
    return CyclicSylow(p, a, tuple(int(v) for v in x), len(exps), tuple(sorted(exps)))


def cyclic_sylow_of(m: CoxeterMatrix, p: int, max_elems: int = DEFAULT_MAX_ELEMS, label: str = "") -> CyclicSylow:
    store = group_store(m, max_elems, label)
    return find_cyclic_sylow(store, p, group_order(m).value)


def permutation_order(g) -> int:
    g = list(g)
    seen = [False] * len(g)
    out = 1
    for i in range(len(g)):
        if not seen[i]:
            k, j = 0, i
            while not seen[j]:
                seen[j] = True
                j = g[j]
                k += 1
            out = lcm(out, k)
    return out
