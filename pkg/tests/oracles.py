"""Independent reference computations used only by the tests.

Nothing here goes through the rule engine: group homology comes from the
normalized bar complex of an explicitly generated permutation group, and
Künneth values from tensor products of small chain complexes.
"""
from __future__ import annotations

from itertools import product

from coxhom.homalg import GradedPLocal, IntMatrix, PGroup, chain_homology, localize


def dihedral_perms(q):
    """Symmetries of a q-gon as permutations of its vertices."""
    rot = tuple((i + 1) % q for i in range(q))
    ref = tuple((-i) % q for i in range(q))
    return close_group([rot, ref])


def cyclic_perms(q):
    return close_group([tuple((i + 1) % q for i in range(q))])


def close_group(gens):
    n = len(gens[0])
    ident = tuple(range(n))
    seen = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for g in frontier:
            for h in gens:
                gh = tuple(h[g[i]] for i in range(n))
                if gh not in seen:
                    seen.add(gh)
                    nxt.append(gh)
        frontier = nxt
    return sorted(seen)


def bar_complex(elems, top):
    """Normalized bar complex C_k = Z[(G - 1)^k] for k <= top, trivial coefficients."""
    n = len(elems[0])
    ident = tuple(range(n))
    idx = {g: i for i, g in enumerate(elems)}
    mul = [[idx[tuple(h[g[i]] for i in range(n))] for h in elems] for g in elems]
    one = idx[ident]
    nontriv = [i for i in range(len(elems)) if i != one]
    bases = [list(product(nontriv, repeat=k)) for k in range(top + 1)]
    where = [{c: i for i, c in enumerate(b)} for b in bases]
    mats = [IntMatrix(0, len(bases[0]))]
    for k in range(1, top + 1):
        ents = {}
        for j, cell in enumerate(bases[k]):
            terms = [(cell[1:], 1)]
            for i in range(k - 1):
                prod_ = mul[cell[i]][cell[i + 1]]
                if prod_ != one:
                    terms.append((cell[:i] + (prod_,) + cell[i + 2:], (-1) ** (i + 1)))
            terms.append((cell[:-1], (-1) ** k))
            for face, sign in terms:
                r = where[k - 1][face]
                v = ents.get((r, j), 0) + sign
                if v:
                    ents[r, j] = v
                else:
                    ents.pop((r, j), None)
        mats.append(IntMatrix(len(bases[k - 1]), len(bases[k]), ents))
    return mats


def bar_homology(elems, p, kmax):
    """H_k(G, Z_(p)) for 1 <= k <= kmax from the bar complex (needs C_{kmax+1})."""
    H = chain_homology(bar_complex(elems, kmax + 1), check=False)
    # the last computed degree has no incoming boundary; drop it
    trimmed = type(H)(H.degrees[:kmax + 1])
    return localize(trimmed, p)


def kunneth_oracle(p, left: dict, right: dict, kmax):
    """Homology of the tensor product of two model complexes, p-localized.

    Each summand Z/p^e in degree k is modelled by a two-cell complex
    Z --p^e--> Z in degrees k+1, k; degree 0 carries a single cell.
    """
    def model(groups):
        cells = [(0, None, None)]  # (degree, piece id, role)
        for k, exps in groups.items():
            for e in exps:
                pid = len(cells)
                cells.append((k, pid, p ** e))
                cells.append((k + 1, pid, p ** e))
        by_deg = {}
        for i, (d, _, _) in enumerate(cells):
            by_deg.setdefault(d, []).append(i)
        bnd = {}
        for i, (d, pid, q) in enumerate(cells):
            if pid is not None and d == cells[pid][0] + 1 and i != pid:
                bnd[i] = {pid: q}
        return cells, bnd

    lc, lb = model(left)
    rc, rb = model(right)
    top = kmax + 1
    basis = {k: [] for k in range(top + 1)}
    for i, (di, _, _) in enumerate(lc):
        for j, (dj, _, _) in enumerate(rc):
            if di + dj <= top:
                basis[di + dj].append((i, j))
    where = {k: {c: n for n, c in enumerate(b)} for k, b in basis.items()}
    mats = [IntMatrix(0, len(basis[0]))]
    for k in range(1, top + 1):
        ents = {}
        for col, (i, j) in enumerate(basis[k]):
            di = lc[i][0]
            for i2, v in lb.get(i, {}).items():
                ents[where[k - 1][(i2, j)], col] = v
            for j2, v in rb.get(j, {}).items():
                key = (where[k - 1][(i, j2)], col)
                ents[key] = ents.get(key, 0) + (-1) ** di * v
        mats.append(IntMatrix(len(basis[k - 1]), len(basis[k]), {k_: v for k_, v in ents.items() if v}))
    H = chain_homology(mats, check=True)
    trimmed = type(H)(H.degrees[:kmax + 1])
    out = {}
    for k in range(1, kmax + 1):
        b, tor = trimmed.degrees[k]
        assert b == 0
        exps = []
        for t in tor:
            e = 0
            while t % p == 0:
                t //= p
                e += 1
            if e:
                exps.append(e)
        if exps:
            out[k] = PGroup(p, tuple(exps))
    return GradedPLocal.build(p, out, kmax)
