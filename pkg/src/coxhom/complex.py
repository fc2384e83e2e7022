"""The Coxeter complex of a finite Coxeter group.

Simplices are cosets ``w W_T`` with ``T`` a proper subset of ``S``; the
simplex has dimension ``|S| - |T| - 1`` and its vertices are labelled by
the types ``S \\ T``.  Cosets are realized through right coset tables
(``w W_T`` corresponds to ``W_T w^-1``), so left translation by a
generator ``s`` is the table column of ``s``.

Orientation: a simplex's vertices are ordered by type, and the face that
drops type ``s`` carries the sign ``(-1)^i`` where ``i`` is the position
of ``s`` among the simplex's types.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

from .coxeter import CoxeterError, CoxeterMatrix, group_order
from .groups import DEFAULT_MAX_ROWS, CosetTable, coset_enumerate
from .homalg import HomologyError, IntMatrix, chain_homology, smith_normal_form

DEFAULT_MAX_SIMPLICES = 5_000_000


class ComplexError(HomologyError):
    pass


def proper_subsets_by_dim(n):
    """For each dimension k, the subsets T with |T| = n - k - 1 in lex order."""
    return [list(combinations(range(n), n - k - 1)) for k in range(n)]


@dataclass
class ComplexIndex:
    m: CoxeterMatrix
    order: int
    tables: dict  # T -> CosetTable of W / W_T
    cells: list  # per dimension, the list of T
    offsets: list  # per dimension, T -> index of (T, row 0)
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def dim(self):
        return self.m.n - 1

    @property
    def f_vector(self):
        return tuple(sum(self.tables[T].rows for T in cells) for cells in self.cells)

    def index(self, T, row):
        return self.offsets[self.m.n - len(T) - 1][T] + row

    def simplices(self, k):
        for T in self.cells[k]:
            for r in range(self.tables[T].rows):
                yield T, r

    def face_map(self, T, U):
        """Row map W/W_T -> W/W_U for T a subset of U (``W_T w -> W_U w``)."""
        key = ("face", T, U)
        if key not in self._cache:
            src, dst = self.tables[T], self.tables[U]
            f = [None] * src.rows
            f[0] = 0
            queue = [0]
            for r in queue:
                for s in range(self.m.n):
                    r2 = src.action[s][r]
                    if f[r2] is None:
                        f[r2] = dst.action[s][f[r]]
                        queue.append(r2)
            self._cache[key] = f
        return self._cache[key]

    def vertices(self, T, row):
        """The vertices of simplex (T, row), ordered by type, as (type, row) pairs."""
        out = []
        for u in range(self.m.n):
            if u in T:
                continue
            V = tuple(x for x in range(self.m.n) if x != u)
            out.append((u, self.face_map(T, V)[row]))
        return out


def build_complex(m: CoxeterMatrix, max_simplices: int = DEFAULT_MAX_SIMPLICES,
                  max_rows: int = DEFAULT_MAX_ROWS) -> ComplexIndex:
    o = group_order(m)
    if o.infinite:
        raise ComplexError("the Coxeter complex of an infinite group is not built")
    if m.n == 0:
        raise ComplexError("rank 0 has an empty Coxeter complex")
    cells = proper_subsets_by_dim(m.n)
    total = sum(o.value // group_order(m.restrict(T)).value for c in cells for T in c)
    if total > max_simplices:
        raise ComplexError(f"{total} simplices exceed the budget {max_simplices}")
    tables, offsets = {}, []
    for c in cells:
        off, pos = {}, 0
        for T in c:
            tables[T] = coset_enumerate(m, T, max_rows)
            expected = o.value // group_order(m.restrict(T)).value
            if tables[T].rows != expected:
                raise ComplexError(f"|W/W_{T}| = {tables[T].rows}, expected {expected}")
            off[T] = pos
            pos += tables[T].rows
        offsets.append(off)
    return ComplexIndex(m, o.value, tables, cells, offsets)


def _face_sign(T, s, n):
    types = [u for u in range(n) if u not in T]
    return -1 if types.index(s) % 2 else 1


def boundary_matrices(X: ComplexIndex) -> list:
    """``[d_0, d_1, ..., d_{n-1}]`` with ``d_k : C_k -> C_{k-1}`` (``d_0`` has no rows)."""
    if "boundary" in X._cache:
        return X._cache["boundary"]
    n = X.m.n
    f = X.f_vector
    mats = [IntMatrix(0, f[0])]
    for k in range(1, n):
        ents = {}
        for T in X.cells[k]:
            col0 = X.offsets[k][T]
            for s in range(n):
                if s in T:
                    continue
                U = tuple(sorted(T + (s,)))
                fm = X.face_map(T, U)
                sign = _face_sign(T, s, n)
                row0 = X.offsets[k - 1][U]
                for r in range(X.tables[T].rows):
                    ents[row0 + fm[r], col0 + r] = sign
        mats.append(IntMatrix(f[k - 1], f[k], ents))
    for k in range(2, n):
        if not mats[k - 1].matmul(mats[k]).is_zero():
            raise ComplexError(f"d_{k - 1} d_{k} != 0")
    X._cache["boundary"] = mats
    return mats


def reduced_top_boundary(X: ComplexIndex) -> IntMatrix:
    """Top boundary map, with the augmentation in place of d_0 when |S| = 1."""
    mats = boundary_matrices(X)
    if X.m.n == 1:
        return IntMatrix(1, 2, {(0, 0): 1, (0, 1): 1})
    return mats[-1]


def complex_homology(X: ComplexIndex):
    if "homology" not in X._cache:
        X._cache["homology"] = chain_homology(boundary_matrices(X), check=False)
    return X._cache["homology"]


def euler_characteristic(X: ComplexIndex) -> int:
    return sum((-1) ** k * c for k, c in enumerate(X.f_vector))


def fundamental_domain_chain(m: CoxeterMatrix) -> list:
    """Chain complex of the single simplex W_T (T proper), in the same basis order."""
    n = m.n
    cells = proper_subsets_by_dim(n)
    idx = [{T: i for i, T in enumerate(c)} for c in cells]
    mats = [IntMatrix(0, len(cells[0]))]
    for k in range(1, n):
        ents = {}
        for T in cells[k]:
            for s in range(n):
                if s not in T:
                    U = tuple(sorted(T + (s,)))
                    ents[idx[k - 1][U], idx[k][T]] = _face_sign(T, s, n)
        mats.append(IntMatrix(len(cells[k - 1]), len(cells[k]), ents))
    return mats


def _translation_sign(X, T, row, s):
    """Sign with which left translation by s carries the oriented simplex (T, row)
    onto the oriented simplex (T, row . s), computed from the vertex cosets."""
    image = [(u, X.tables[tuple(x for x in range(X.m.n) if x != u)].action[s][r])
             for u, r in X.vertices(T, row)]
    target = X.vertices(T, X.tables[T].action[s][row])
    pos = {v: i for i, v in enumerate(target)}
    try:
        perm = [pos[v] for v in image]
    except KeyError:
        raise ComplexError(f"translation by {s} does not map the vertices of {T}:{row} onto a simplex") from None
    sign = 1
    seen = [False] * len(perm)
    for i in range(len(perm)):
        if not seen[i]:
            j, length = i, 0
            while not seen[j]:
                seen[j] = True
                j = perm[j]
                length += 1
            if length % 2 == 0:
                sign = -sign
    return sign


def _orbits(X, k):
    """Orbits of k-simplices under left translation, with orientation signs
    relative to the orbit's first simplex (union-find with parity)."""
    n = X.m.n
    simplices = list(X.simplices(k))
    where = {sx: i for i, sx in enumerate(simplices)}
    parent = list(range(len(simplices)))
    parity = [1] * len(simplices)

    def find(i):
        sign = 1
        path = []
        while parent[i] != i:
            path.append(i)
            sign *= parity[i]
            i = parent[i]
        # compress
        acc = sign
        for j in path:
            s_j = parity[j]
            parent[j], parity[j] = i, acc
            acc *= s_j
        return i, sign

    for idx, (T, row) in enumerate(simplices):
        for s in range(n):
            jdx = where[T, X.tables[T].action[s][row]]
            sign = _translation_sign(X, T, row, s)
            ri, si = find(idx)
            rj, sj = find(jdx)
            if ri == rj:
                if si * sj != sign:
                    raise ComplexError("an orbit contains a simplex with both orientations")
                continue
            lo, hi = min(ri, rj), max(ri, rj)
            parent[hi] = lo
            parity[hi] = si * sj * sign
    out = {}
    for i, sx in enumerate(simplices):
        root, sign = find(i)
        out[sx] = (simplices[root], sign)
    return out


def orbit_chain_complex(X: ComplexIndex) -> list:
    """The coinvariant chain complex C_*(X_W)_W, in the basis of orbits of W_T.

    Orbits and their orientation are computed from the translation action;
    the result is checked to be a based isomorph of the simplex complex
    from ``fundamental_domain_chain`` under ``w W_T -> W_T``.
    """
    n = X.m.n
    orbit = [_orbits(X, k) for k in range(n)]
    basis = []
    for k in range(n):
        reps = sorted({rep for rep, _ in orbit[k].values()}, key=lambda sx: (X.cells[k].index(sx[0]), sx[1]))
        if [sx[0] for sx in reps] != X.cells[k] or any(r != 0 for _, r in reps):
            raise ComplexError(f"dimension {k}: orbit representatives are not the cells W_T")
        basis.append({sx: i for i, sx in enumerate(reps)})
    mats = boundary_matrices(X)
    out = [IntMatrix(0, len(basis[0]))]
    for k in range(1, n):
        d = mats[k]
        cols = {}
        for (i, j), v in d.entries.items():
            cols.setdefault(j, {})[i] = v
        lower = list(X.simplices(k - 1))
        ents = {}
        for T in X.cells[k]:
            reference = None
            for r in range(X.tables[T].rows):
                rep, sign = orbit[k][T, r]
                projected = {}
                for i, v in cols.get(X.index(T, r), {}).items():
                    frep, fsign = orbit[k - 1][lower[i]]
                    key = basis[k - 1][frep]
                    projected[key] = projected.get(key, 0) + v * fsign * sign
                projected = {key: v for key, v in projected.items() if v}
                if reference is None:
                    reference = projected
                elif projected != reference:
                    raise ComplexError(f"coinvariant boundary of the orbit of W_{T} is not well defined")
            for i, v in reference.items():
                ents[i, basis[k][(T, 0)]] = v
        out.append(IntMatrix(len(basis[k - 1]), len(basis[k]), ents))
    expected = fundamental_domain_chain(X.m)
    for k, (a, b) in enumerate(zip(out, expected)):
        if (a.rows, a.cols, a.entries) != (b.rows, b.cols, b.entries):
            raise ComplexError(f"orbit complex differs from the fundamental simplex in degree {k}")
    return out


def fundamental_cycle(X: ComplexIndex) -> dict:
    """A generator of top homology, as ``{top simplex index: +-1}``.

    Adjacent chambers w and ws share the panel w W_{s}; both see it with
    the same face sign, so a cycle must alternate.  Walking the chamber
    graph from the identity fixes the cycle up to sign.
    """
    table = X.tables[()]
    z = {0: 1}
    queue = [0]
    for r in queue:
        for s in range(X.m.n):
            r2 = table.action[s][r]
            if r2 not in z:
                z[r2] = -z[r]
                queue.append(r2)
            elif z[r2] != -z[r]:
                raise ComplexError("chamber graph is not bipartite")
    base = X.offsets[-1][()]
    cycle = {base + r: v for r, v in z.items()}
    if reduced_top_boundary(X).apply(cycle):
        raise ComplexError("alternating chamber sum is not a cycle")
    return cycle


def top_homology_rank(X: ComplexIndex) -> int:
    if "top_rank" not in X._cache:
        d = reduced_top_boundary(X)
        X._cache["top_rank"] = d.cols - smith_normal_form(d).rank
    return X._cache["top_rank"]


def generator_action_on_top(X: ComplexIndex, s: int) -> int:
    """Degree of left translation by generator s on H_{|S|-1}(X_W; Z)."""
    if not 0 <= s < X.m.n:
        raise CoxeterError(f"no generator {s}")
    if top_homology_rank(X) != 1:
        raise ComplexError("top homology is not of rank 1")
    z = fundamental_cycle(X)
    table = X.tables[()]
    base = X.offsets[-1][()]
    image = {}
    for idx, v in z.items():
        r = idx - base
        image[base + table.action[s][r]] = v * _translation_sign(X, (), r, s)
    ratios = {image.get(i, 0) * v for i, v in z.items()}  # v = +-1
    if len(ratios) != 1 or set(image) != set(z):
        raise ComplexError(f"translation by {s} does not preserve the fundamental class up to sign")
    return ratios.pop()


def export_triplets(X: ComplexIndex) -> str:
    """f-vector line, then one ``k row col value`` line per boundary entry."""
    lines = ["f " + " ".join(map(str, X.f_vector))]
    for k, d in enumerate(boundary_matrices(X)):
        lines += [f"{k} {i} {j} {v}" for i, j, v in d.triplets()]
    return "\n".join(lines) + "\n"
