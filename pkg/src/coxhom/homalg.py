"""Exact integer homological algebra.

Sparse Smith normal form over Z, homology of chain complexes, finite
abelian p-groups, the Künneth formula over Z_(p), and the two spectral
sequence checks on the Coxeter complex (rows of the E1 page and the E2
base row).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from math import comb, gcd

from .coxeter import CoxeterMatrix, check_odd_prime, is_finite


class HomologyError(ValueError):
    pass


# --------------------------------------------------------------------------
# sparse integer matrices

@dataclass
class IntMatrix:
    rows: int
    cols: int
    entries: dict = field(default_factory=dict)  # (i, j) -> nonzero int

    @classmethod
    def from_dense(cls, data):
        data = [list(r) for r in data]
        ncols = len(data[0]) if data else 0
        ents = {(i, j): int(v) for i, r in enumerate(data) for j, v in enumerate(r) if v}
        return cls(len(data), ncols, ents)

    def to_dense(self):
        out = [[0] * self.cols for _ in range(self.rows)]
        for (i, j), v in self.entries.items():
            out[i][j] = v
        return out

    def row_dicts(self):
        rows = {}
        for (i, j), v in self.entries.items():
            rows.setdefault(i, {})[j] = v
        return rows

    def column(self, j):
        return {i: v for (i, jj), v in self.entries.items() if jj == j}

    def matmul(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise HomologyError(f"shape mismatch {self.rows}x{self.cols} @ {other.rows}x{other.cols}")
        left = self.row_dicts()
        right = other.row_dicts()
        out = {}
        for i, row in left.items():
            acc = {}
            for k, a in row.items():
                for j, b in right.get(k, {}).items():
                    acc[j] = acc.get(j, 0) + a * b
            for j, v in acc.items():
                if v:
                    out[i, j] = v
        return IntMatrix(self.rows, other.cols, out)

    def apply(self, vec: dict) -> dict:
        """Matrix times a sparse column vector ``{index: value}``."""
        out = {}
        for (i, j), v in self.entries.items():
            if j in vec:
                out[i] = out.get(i, 0) + v * vec[j]
        return {i: v for i, v in out.items() if v}

    def is_zero(self):
        return not self.entries

    def permuted(self, row_perm, col_perm):
        return IntMatrix(self.rows, self.cols,
                         {(row_perm[i], col_perm[j]): v for (i, j), v in self.entries.items()})

    def triplets(self):
        return sorted((i, j, v) for (i, j), v in self.entries.items())


# --------------------------------------------------------------------------
# Smith normal form

@dataclass(frozen=True)
class SNFResult:
    diagonal: tuple  # d_1 | d_2 | ... | d_r, all positive

    @property
    def rank(self):
        return len(self.diagonal)

    @property
    def torsion(self):
        return tuple(d for d in self.diagonal if d > 1)


def _invariant_factors(diag):
    units = [d for d in diag if d == 1]
    rest = sorted(d for d in diag if d != 1)
    for i in range(len(rest)):
        for j in range(i + 1, len(rest)):
            a, b = rest[i], rest[j]
            g = gcd(a, b)
            rest[i], rest[j] = g, a // g * b
    units += [d for d in rest if d == 1]
    return tuple(units + [d for d in rest if d != 1])


class _Sparse:
    """Row dictionaries plus a column -> rows index, kept in sync."""

    def __init__(self, M: IntMatrix):
        self.rows = M.row_dicts()
        self.cols = {}
        for i, r in self.rows.items():
            for j in r:
                self.cols.setdefault(j, set()).add(i)

    def add_row(self, dst, src, q):
        """row[dst] += q * row[src]"""
        if not q:
            return
        rd = self.rows[dst]
        for j, v in self.rows[src].items():
            new = rd.get(j, 0) + q * v
            if new:
                if j not in rd:
                    self.cols[j].add(dst)
                rd[j] = new
            else:
                del rd[j]
                self.cols[j].discard(dst)
        if not rd:
            del self.rows[dst]

    def add_col(self, dst, src, q):
        """col[dst] += q * col[src]"""
        if not q:
            return
        for i in list(self.cols.get(src, ())):
            r = self.rows[i]
            new = r.get(dst, 0) + q * r[src]
            if new:
                if dst not in r:
                    self.cols.setdefault(dst, set()).add(i)
                r[dst] = new
            else:
                del r[dst]
                self.cols[dst].discard(i)
        if dst in self.cols and not self.cols[dst]:
            del self.cols[dst]

    def drop(self, i, j):
        for c in self.rows.pop(i, {}):
            self.cols[c].discard(i)
            if not self.cols[c]:
                del self.cols[c]
        self.cols.pop(j, None)

    def eliminate_unit(self, i, j):
        v = self.rows[i][j]
        for r in sorted(self.cols[j] - {i}):
            self.add_row(r, i, -self.rows[r][j] * v)
        self.drop(i, j)


def smith_normal_form(M: IntMatrix) -> SNFResult:
    """Invariant factors of an integer matrix.

    Unit pivots are eliminated first, column by column, taking the
    shortest row holding a +-1.  Whatever remains is reduced with the
    smallest-magnitude pivot until it is diagonal, and the diagonal is
    then normalized into a divisibility chain.
    """
    A = _Sparse(M)
    diag = []
    progress = True
    while progress:
        progress = False
        for j in sorted(A.cols):
            if j not in A.cols:
                continue
            best = None
            for i in A.cols[j]:
                if abs(A.rows[i][j]) == 1:
                    key = (len(A.rows[i]), i)
                    if best is None or key < best:
                        best = key
            if best is not None:
                A.eliminate_unit(best[1], j)
                diag.append(1)
                progress = True

    while A.rows:
        _, _, _, i, j = min((abs(v), len(A.rows[i]) + len(A.cols[j]), 0, i, j)
                            for i, r in A.rows.items() for j, v in r.items())
        piv = A.rows[i][j]
        if abs(piv) == 1:
            A.eliminate_unit(i, j)
            diag.append(1)
            continue
        for r in sorted(A.cols[j] - {i}):
            A.add_row(r, i, -(A.rows[r][j] // piv))
        for c in sorted(set(A.rows[i]) - {j}):
            A.add_col(c, j, -(A.rows[i][c] // piv))
        if A.cols[j] == {i} and set(A.rows[i]) == {j}:
            diag.append(abs(piv))
            A.drop(i, j)
    return SNFResult(_invariant_factors(diag))


# --------------------------------------------------------------------------
# homology of chain complexes

@dataclass(frozen=True)
class HomologyGroups:
    degrees: tuple  # per degree k: (free rank, torsion coefficients)

    def betti(self, k):
        return self.degrees[k][0]

    def torsion(self, k):
        return self.degrees[k][1]

    def __len__(self):
        return len(self.degrees)

    def is_trivial(self, k):
        return self.degrees[k] == (0, ())

    def __str__(self):
        parts = []
        for b, tor in self.degrees:
            terms = (["Z"] if b == 1 else [f"Z^{b}"] if b else []) + [f"Z/{d}" for d in tor]
            parts.append("⊕".join(terms) or "0")
        return "(" + ", ".join(parts) + ")"


def sphere_homology(dim):
    """Integral homology of the dim-sphere, as degrees 0..dim."""
    if dim == 0:
        return HomologyGroups(((2, ()),))
    return HomologyGroups(tuple((1 if k in (0, dim) else 0, ()) for k in range(dim + 1)))


def point_homology(dim):
    return HomologyGroups(tuple(((1 if k == 0 else 0), ()) for k in range(dim + 1)))


def chain_homology(C: list, check=True) -> HomologyGroups:
    """Homology of ``C[0] <- C[1] <- ...`` given boundary maps ``d_k = C[k]``.

    ``C[k]`` maps degree k to degree k-1; ``C[0]`` has zero rows and only
    records the rank of the degree-0 chain group.
    """
    if check:
        for k in range(1, len(C)):
            if C[k - 1].cols != C[k].rows:
                raise HomologyError(f"d_{k} and d_{k - 1} do not compose")
            if not C[k - 1].matmul(C[k]).is_zero():
                raise HomologyError(f"d_{k - 1} d_{k} != 0")
    snf = [smith_normal_form(d) for d in C]
    out = []
    for k, d in enumerate(C):
        nxt = snf[k + 1] if k + 1 < len(C) else SNFResult(())
        free = d.cols - snf[k].rank - nxt.rank
        out.append((free, nxt.torsion))
    return HomologyGroups(tuple(out))


def euler_characteristic(C: list) -> int:
    return sum((-1) ** k * d.cols for k, d in enumerate(C))


# --------------------------------------------------------------------------
# p-local groups

def p_part_exponent(n: int, p: int) -> int:
    e = 0
    while n and n % p == 0:
        n //= p
        e += 1
    return e


@dataclass(frozen=True)
class PGroup:
    """Direct sum of cyclic groups Z/p^e, stored as descending exponents."""
    p: int
    exponents: tuple = ()

    def __post_init__(self):
        if any(e < 1 for e in self.exponents):
            raise HomologyError("exponents must be >= 1")
        object.__setattr__(self, "exponents", tuple(sorted(self.exponents, reverse=True)))

    @classmethod
    def cyclic(cls, p, order):
        e = p_part_exponent(order, p)
        return cls(p, (e,) if e else ())

    @property
    def trivial(self):
        return not self.exponents

    @property
    def order(self):
        return self.p ** sum(self.exponents)

    def __add__(self, other: "PGroup"):
        if other.p != self.p:
            raise HomologyError("prime mismatch")
        return PGroup(self.p, self.exponents + other.exponents)

    def __str__(self):
        if self.trivial:
            return "0"
        return "⊕".join(f"Z/{self.p ** e}" for e in self.exponents)


@dataclass(frozen=True)
class GradedPLocal:
    """Positive-degree p-local homology; degree 0 is implicitly Z_(p).

    ``kmax`` is the horizon up to which the values are known (``None``:
    known in every degree, all unlisted degrees trivial).
    """
    p: int
    groups: tuple = ()  # sorted (degree, PGroup) pairs, nontrivial only
    kmax: int | None = None

    @classmethod
    def build(cls, p, mapping, kmax=None):
        items = tuple(sorted((k, g) for k, g in mapping.items() if not g.trivial and k >= 1))
        if kmax is not None:
            items = tuple((k, g) for k, g in items if k <= kmax)
        return cls(p, items, kmax)

    @classmethod
    def trivial(cls, p):
        return cls(p, (), None)

    def __getitem__(self, k) -> PGroup:
        for d, g in self.groups:
            if d == k:
                return g
        return PGroup(self.p)

    def as_dict(self):
        return dict(self.groups)

    def vanishes(self, lo, hi):
        return all(self[k].trivial for k in range(lo, hi + 1))


def localize(H: HomologyGroups, p: int, group_homology: bool = True) -> GradedPLocal:
    """p-parts of the torsion of ``H`` in positive degrees."""
    check_odd_prime(p)
    out = {}
    for k in range(1, len(H)):
        b, tor = H.degrees[k]
        if group_homology and b:
            raise HomologyError(f"free rank {b} in degree {k} cannot be group homology")
        exps = tuple(e for e in (p_part_exponent(d, p) for d in tor) if e)
        if exps:
            out[k] = PGroup(p, exps)
    return GradedPLocal.build(p, out, kmax=len(H) - 1)


def _min_horizon(*hs):
    finite = [h for h in hs if h is not None]
    return min(finite) if finite else None


def kunneth(Hl: GradedPLocal, Hr: GradedPLocal, kmax: int | None = None) -> GradedPLocal:
    """Homology of a direct product over Z_(p).

    Degree k collects H_i (x) H_j for i + j = k and Tor(H_i, H_j) for
    i + j = k - 1; on cyclic summands both are Z/p^min(a, b).
    """
    if Hl.p != Hr.p:
        raise HomologyError(f"prime mismatch {Hl.p} != {Hr.p}")
    p = Hl.p
    horizon = _min_horizon(Hl.kmax, Hr.kmax, kmax)
    top = horizon
    if top is None:
        dl = max((k for k, _ in Hl.groups), default=0)
        dr = max((k for k, _ in Hr.groups), default=0)
        top = dl + dr + 1
    L, R = Hl.as_dict(), Hr.as_dict()
    out = {}
    for k in range(1, top + 1):
        exps = list(L.get(k, PGroup(p)).exponents) + list(R.get(k, PGroup(p)).exponents)
        for i, gi in L.items():
            for total in (k, k - 1):
                gj = R.get(total - i)
                if gj is not None and 1 <= total - i:
                    exps += [min(a, b) for a in gi.exponents for b in gj.exponents]
        if exps:
            out[k] = PGroup(p, tuple(exps))
    return GradedPLocal.build(p, out, horizon)


# --------------------------------------------------------------------------
# spectral sequence checks

@dataclass(frozen=True)
class E1Page:
    """Rows of the first page of the isotropy spectral sequence.

    ``base_ranks[i]`` is the rank of the free Z_(p)-module in row 0,
    column i; ``terms[(i, j)]`` is the p-group in row j >= 1.
    """
    rank: int
    p: int
    kmax: int
    base_ranks: tuple
    terms: tuple  # sorted ((i, j), PGroup)
    unresolved: tuple = ()  # (i, j) positions some parabolic left open

    def term(self, i, j) -> PGroup:
        return dict(self.terms).get((i, j), PGroup(self.p))

    def row_vanishes(self, j):
        return all(self.term(i, j).trivial for i in range(self.rank)) and \
            not any(jj == j for _, jj in self.unresolved)


def e1_page(m: CoxeterMatrix, p: int, kmax: int, engine=None) -> E1Page:
    """E1_{i,j} = sum of H_j(W_T, Z_(p)) over T of size |S| - i - 1, for j <= kmax.

    ``engine(matrix, p, kmax)`` must return an object with ``homology``
    (a GradedPLocal) and ``unresolved`` (a set of degrees).  Differentials
    on rows j > 0 are not computed.
    """
    check_odd_prime(p)
    if engine is None:
        from .plocal import derive_homology as engine
    n = m.n
    base = tuple(comb(n, i + 1) for i in range(n))
    terms, open_ = {}, set()
    for i in range(n):
        for T in combinations(range(n), n - i - 1):
            res = engine(m.restrict(T), p, kmax)
            for j in range(1, kmax + 1):
                if j in res.unresolved:
                    open_.add((i, j))
                g = res.homology[j]
                if not g.trivial:
                    terms[i, j] = terms.get((i, j), PGroup(p)) + g
    return E1Page(n, p, kmax, base, tuple(sorted(terms.items())), tuple(sorted(open_)))


def base_row_check(m: CoxeterMatrix) -> bool:
    """Row 0 of the E2 page is Z_(p) in column 0 and zero elsewhere.

    Row 0 of E1 is the coinvariant chain complex of the Coxeter complex;
    its homology must be that of a point.
    """
    from .complex import build_complex, orbit_chain_complex

    if not is_finite(m):
        raise HomologyError("base-row check needs a finite Coxeter group")
    orbit = orbit_chain_complex(build_complex(m))
    return chain_homology(orbit) == point_homology(m.n - 1)


def top_coinvariants(X, p: int) -> PGroup:
    """Coinvariants of the top homology H_{n-1}(X_W; Z_(p)) ~ Z_(p) under W.

    Each generator acts by a degree +-1; the coinvariants are Z_(p) modulo
    the ideal generated by the numbers 1 - degree.
    """
    from .complex import generator_action_on_top

    check_odd_prime(p)
    degrees = [generator_action_on_top(X, s) for s in range(X.m.n)]
    if any(d not in (1, -1) for d in degrees):
        raise HomologyError(f"generator degrees {degrees} are not +-1")
    g = 0
    for d in degrees:
        g = gcd(g, 1 - d)
    if g == 0:
        raise HomologyError("trivial action on top homology: coinvariants are Z_(p), not a finite p-group")
    return PGroup.cyclic(p, g)
