"""p-local homology of Coxeter groups by reduction rules, with certificates.

``derive_homology`` resolves ``H_k(W, Z_(p))`` for ``1 <= k <= kmax`` by
trying rules cheapest first and records the path it took as a
``Derivation`` tree.  Degrees no rule reaches stay unresolved; they are
never reported as zero.
"""
from __future__ import annotations

import json
import threading
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations

from .coxeter import (INF, CoxeterError, CoxeterMatrix, IrredType, catalog, check_odd_prime,
                      decompose, parse_coxeter, group_order, has_p_torsion, is_aspherical, is_p_free)
from .groups import (DEFAULT_MAX_ELEMS, BudgetExceeded, SylowNotCyclic, UnfaithfulRepresentation,
                     find_cyclic_sylow, group_store, permutation_order)
from .homalg import GradedPLocal, PGroup, kunneth, p_part_exponent

KMAX_CAP = 64

CITATIONS = {
    "NoPTorsion": "a Coxeter group without p-torsion has H_k(W, Z_(p)) = 0 for k > 0; "
                  "p-torsion is detected on finite parabolic subgroups",
    "Kunneth": "Künneth formula over the principal ideal domain Z_(p) for a direct product",
    "ReduceB": "W(B_n) = (Z/2)^n ⋊ W(A_{n-1}) and (Z/2)^n is p-locally acyclic, "
               "so H_*(W(B_n), Z_(p)) = H_*(W(A_{n-1}), Z_(p))",
    "ReduceD": "W(D_n) = (Z/2)^{n-1} ⋊ W(A_{n-1}), so H_*(W(D_n), Z_(p)) = H_*(W(A_{n-1}), Z_(p))",
    "Dihedral": "H_k(W(I_2(q)), Z_(p)) = (Z/q)_(p) for k = 3 mod 4 and 0 otherwise",
    "SymmetricSwan": "S_n: no p-torsion for n < p; cyclic Sylow C_p with N(C_p) -> Aut(C_p) "
                     "onto for p <= n < 2p; vanishing through degree 2(p-2) for all n by stability",
    "SwanCyclicSylow": "cyclic Sylow P: H^*(G, Z)_(p) = H^*(P, Z)^N(P) (Swan), "
                       "and H_k(G, Z_(p)) = H^{k+1}(G, Z)_(p) for finite G",
    "TransferToParabolic": "restriction to a parabolic subgroup of index prime to p is injective "
                           "on p-local homology (transfer)",
    "AsphericalSum": "aspherical W: H_k(W, Z_(p)) is the sum of H_k(W_{s,t}, Z_(p)) over "
                     "pairs with p | m(s,t)",
    "LowDegreeHowlett": "H_1(W, Z) and H_2(W, Z) are elementary abelian 2-groups",
    "Unresolved": "no rule applies",
}
RULES = tuple(CITATIONS)


class OutOfClosedFormRange(ValueError):
    pass


# --------------------------------------------------------------------------
# closed forms

def _check_degree(k):
    if not isinstance(k, int) or k < 1:
        raise ValueError(f"degree {k!r} must be >= 1 (degree 0 is the free part)")


def cyclic_homology(order: int, p: int, k: int) -> PGroup:
    """H_k(Z/order, Z_(p)): the p-part of Z/order in odd degrees."""
    check_odd_prime(p)
    _check_degree(k)
    return PGroup.cyclic(p, order) if k % 2 else PGroup(p)


def dihedral_homology(q: int, p: int, k: int) -> PGroup:
    """H_k of the dihedral group of order 2q with Z_(p) coefficients, p odd."""
    check_odd_prime(p)
    _check_degree(k)
    return PGroup.cyclic(p, q) if k % 4 == 3 else PGroup(p)


def swan_from_sylow(order_p: int, e: int, p: int, k: int) -> PGroup:
    """H_k(G, Z_(p)) for G with cyclic Sylow subgroup of order p^a whose
    normalizer acts on it through a group of automorphisms of order e.

    Invariants of H^*(C_{p^a}) = Z[u]/(p^a u) are spanned by u^m with e | m,
    and H_k = H^{k+1} p-locally, so the answer is Z/p^a exactly when
    k = 2e - 1 mod 2e.
    """
    check_odd_prime(p)
    _check_degree(k)
    a = p_part_exponent(order_p, p)
    if a == 0 or p ** a != order_p:
        raise ValueError(f"{order_p} is not a positive power of {p}")
    if e < 1 or ((p - 1) * p ** (a - 1)) % e:
        raise ValueError(f"e = {e} does not divide |Aut(C_{order_p})|")
    if e % p == 0:
        raise ValueError(f"e = {e} has a p-part; the normalizer of a Sylow subgroup cannot act so")
    return PGroup(p, (a,)) if k % (2 * e) == 2 * e - 1 else PGroup(p)


def symmetric_homology(n: int, p: int, k: int) -> PGroup:
    """H_k(S_n, Z_(p)) where a closed form is available."""
    check_odd_prime(p)
    _check_degree(k)
    if n < p:
        return PGroup(p)
    if n < 2 * p:
        return swan_from_sylow(p, p - 1, p, k)
    if k <= 2 * (p - 2):
        return PGroup(p)
    raise OutOfClosedFormRange(f"H_{k}(S_{n}, Z_({p})): Sylow subgroup not cyclic, beyond the stable vanishing range")


def reduce_BD(t: IrredType) -> IrredType:
    if t.family == "B" and t.rank >= 2:
        return IrredType("A", t.rank - 1)
    if t.family == "D" and t.rank >= 4:
        return IrredType("A", t.rank - 1)
    raise ValueError(f"{t.label} is not of type B_n (n >= 2) or D_n (n >= 4)")


def transfer_reduction(m: CoxeterMatrix, p: int):
    """Largest-order proper parabolic T with the same p-part of the order as W, or None.

    Ties are broken by the lexicographically smallest T.
    """
    check_odd_prime(p)
    o = group_order(m)
    if o.infinite:
        raise CoxeterError("transfer reduction needs a finite Coxeter group")
    v = o.valuation(p)
    best = None
    for size in range(m.n - 1, -1, -1):
        for T in combinations(range(m.n), size):
            oT = group_order(m.restrict(T))
            if oT.valuation(p) == v:
                key = (-oT.value, T)
                if best is None or key < best:
                    best = key
    return None if best is None else best[1]


def aspherical_homology(m: CoxeterMatrix, p: int, k: int) -> PGroup:
    check_odd_prime(p)
    _check_degree(k)
    if not is_aspherical(m):
        raise ValueError("Coxeter group is not aspherical")
    out = PGroup(p)
    if k <= 2:
        return out
    for _, _, lab in m.labels():
        if lab is not INF and lab % p == 0:
            out = out + dihedral_homology(lab, p, k)
    return out


# --------------------------------------------------------------------------
# certificates

def _values_json(values):
    return {str(k): list(g.exponents) for k, g in sorted(values.items()) if not g.trivial}


@dataclass(frozen=True)
class Derivation:
    """One rule application for the goal H_k(group, Z_(p)), k in ``degrees``.

    ``values`` and ``resolved`` cover this node together with ``rest``, a
    node for the same group handling the degrees this rule left open.
    """
    rule: str
    group: str
    p: int
    degrees: tuple
    values: tuple  # sorted (k, exponents) for nontrivial resolved degrees
    resolved: tuple
    evidence: tuple = ()  # sorted (key, json-able value)
    children: tuple = ()
    rest: "Derivation | None" = None

    @property
    def citation(self):
        return CITATIONS[self.rule]

    def value(self, k) -> PGroup:
        return PGroup(self.p, dict(self.values).get(k, ()))

    def homology(self) -> GradedPLocal:
        kmax = max(self.degrees) if self.degrees else 0
        return GradedPLocal.build(self.p, {k: PGroup(self.p, e) for k, e in self.values}, kmax)

    @property
    def unresolved(self):
        return tuple(k for k in self.degrees if k not in self.resolved)

    def ev(self, key, default=None):
        return dict(self.evidence).get(key, default)

    def to_json(self):
        return {
            "rule": self.rule,
            "citation": self.citation,
            "group": self.group,
            "p": self.p,
            "degrees": list(self.degrees),
            "values": {str(k): list(e) for k, e in self.values},
            "resolved": list(self.resolved),
            "evidence": {k: _thaw(v) for k, v in self.evidence},
            "children": [c.to_json() for c in self.children],
            "rest": self.rest.to_json() if self.rest else None,
        }

    def dumps(self):
        return json.dumps(self.to_json(), sort_keys=True, ensure_ascii=False, indent=1)

    @classmethod
    def from_json(cls, obj):
        return cls(
            obj["rule"], obj["group"], int(obj["p"]), tuple(obj["degrees"]),
            tuple(sorted((int(k), tuple(v)) for k, v in obj["values"].items())),
            tuple(obj["resolved"]),
            tuple(sorted((k, _freeze(v)) for k, v in obj["evidence"].items())),
            tuple(cls.from_json(c) for c in obj["children"]),
            cls.from_json(obj["rest"]) if obj.get("rest") else None,
        )

    def rules_used(self):
        out = {self.rule}
        for c in self.children:
            out |= c.rules_used()
        if self.rest:
            out |= self.rest.rules_used()
        return out


def _freeze(v):
    if isinstance(v, list):
        return tuple(_freeze(x) for x in v)
    if isinstance(v, dict):
        return tuple(sorted((k, _freeze(x)) for k, x in v.items()))
    return v


def _thaw(v):
    if isinstance(v, tuple):
        return [_thaw(x) for x in v]
    return v


def _node(rule, group, p, degrees, own_values, own_resolved, evidence=(), children=(), rest=None):
    values = {k: g for k, g in own_values.items() if k in own_resolved and not g.trivial}
    resolved = set(own_resolved)
    if rest is not None:
        resolved |= set(rest.resolved)
        values.update({k: PGroup(p, e) for k, e in rest.values})
    return Derivation(
        rule, group, p, tuple(degrees),
        tuple(sorted((k, g.exponents) for k, g in values.items())),
        tuple(sorted(resolved)),
        tuple(sorted((k, _freeze(v)) for k, v in dict(evidence).items())),
        tuple(children), rest,
    )


def _own_contribution(d: Derivation, children_hom):
    """Values and resolved degrees a node contributes on its own, recomputed
    from its evidence and its children's (replayed) values."""
    p, degs = d.p, d.degrees
    rule = d.rule
    if rule == "NoPTorsion":
        m = parse_coxeter(d.ev("matrix"))
        if has_p_torsion(m, p):
            raise CertificateError(f"{d.group} has {p}-torsion")
        return {}, set(degs)
    if rule == "LowDegreeHowlett":
        return {}, {k for k in degs if k <= 2}
    if rule == "Unresolved":
        return {}, set()
    if rule == "Dihedral":
        q = d.ev("q")
        return {k: dihedral_homology(q, p, k) for k in degs}, set(degs)
    if rule == "SymmetricSwan":
        n = d.ev("letters")
        vals, res = {}, set()
        for k in degs:
            try:
                vals[k] = symmetric_homology(n, p, k)
                res.add(k)
            except OutOfClosedFormRange:
                pass
        return vals, res
    if rule == "SwanCyclicSylow":
        a, e = d.ev("a"), d.ev("e")
        if permutation_order(d.ev("sylow_generator")) != p ** a:
            raise CertificateError("recorded Sylow generator has the wrong order")
        return {k: swan_from_sylow(p ** a, e, p, k) for k in degs}, set(degs)
    if rule in ("ReduceB", "ReduceD"):
        (child_vals, child_res), = children_hom
        return {k: child_vals.get(k, PGroup(p)) for k in degs if k in child_res}, {k for k in degs if k in child_res}
    if rule == "TransferToParabolic":
        (child_vals, child_res), = children_hom
        zero = {k for k in degs if k in child_res and child_vals.get(k, PGroup(p)).trivial}
        return {}, zero
    if rule == "AsphericalSum":
        vals = {}
        for k in degs:
            g = PGroup(p)
            if k > 2:
                for child_vals, _ in children_hom:
                    g = g + child_vals.get(k, PGroup(p))
            vals[k] = g
        # children cover every degree (closed forms)
        return vals, set(degs)
    if rule == "Kunneth":
        prefix = min((_prefix(res, degs) for _, res in children_hom), default=max(degs, default=0))
        acc = GradedPLocal.trivial(p)
        for child_vals, _ in children_hom:
            acc = kunneth(acc, GradedPLocal.build(p, child_vals, prefix), prefix)
        return {k: acc[k] for k in degs if k <= prefix}, {k for k in degs if k <= prefix}
    raise CertificateError(f"unknown rule {rule}")


def _prefix(resolved, degrees):
    r = 0
    for k in sorted(degrees):
        if k not in resolved:
            break
        r = k
    return r


class CertificateError(ValueError):
    pass


def replay(d: Derivation):
    """Recompute a certificate bottom-up from its leaves and compare.

    Returns ``(values, resolved)``; raises CertificateError on any mismatch.
    """
    children_hom = [replay(c) for c in d.children]
    vals, res = _own_contribution(d, children_hom)
    vals = {k: g for k, g in vals.items() if k in res and not g.trivial}
    if d.rest is not None:
        if d.rest.group != d.group or set(d.rest.degrees) & res:
            raise CertificateError("fallback node overlaps the degrees of its parent")
        rv, rr = replay(d.rest)
        vals.update(rv)
        res |= rr
    stored = {k: PGroup(d.p, e) for k, e in d.values}
    if set(d.resolved) != res or stored != vals:
        raise CertificateError(f"{d.rule} node for {d.group} does not replay: {stored} vs {vals}")
    return vals, res


# --------------------------------------------------------------------------
# the engine

@dataclass(frozen=True)
class EngineConfig:
    max_elems: int = DEFAULT_MAX_ELEMS
    enumerate: bool = True


@dataclass(frozen=True)
class Derived:
    homology: GradedPLocal
    derivation: Derivation
    unresolved: frozenset

    def __iter__(self):
        return iter((self.homology, self.derivation))


def _fallback(m, p, degrees, cfg, label):
    """Rules that apply to any finite group: Swan by enumeration, then low degrees."""
    degrees = tuple(degrees)
    if not degrees:
        return None
    attempts = []
    o = group_order(m)
    if cfg.enumerate and not o.infinite and o.valuation(p) > 0:
        try:
            store = group_store(m, cfg.max_elems, label)
            syl = find_cyclic_sylow(store, p, o.value)
            vals = {k: swan_from_sylow(syl.order, syl.e, p, k) for k in degrees}
            return _node("SwanCyclicSylow", label, p, degrees, vals, set(degrees), {
                "a": syl.a, "e": syl.e, "conjugation_exponents": list(syl.exponents),
                "sylow_generator": list(syl.generator), "store_size": len(store),
                "store_degree": store.degree,
            })
        except (SylowNotCyclic, BudgetExceeded, UnfaithfulRepresentation) as exc:
            attempts.append(f"SwanCyclicSylow: {exc}")
    low = tuple(k for k in degrees if k <= 2)
    high = tuple(k for k in degrees if k > 2)
    rest = _node("Unresolved", label, p, high, {}, set(), {"attempted": attempts}) if high else None
    if low:
        return _node("LowDegreeHowlett", label, p, low + high, {}, set(low), {}, (), rest)
    return rest


def _component_node(m, p, degrees, cfg, t: IrredType, label):
    n = t.rank
    if t.family == "A":
        vals, res = {}, set()
        for k in degrees:
            try:
                vals[k] = symmetric_homology(n + 1, p, k)
                res.add(k)
            except OutOfClosedFormRange:
                pass
        rest = _fallback(m, p, [k for k in degrees if k not in res], cfg, label)
        return _node("SymmetricSwan", label, p, degrees, vals, res, {"letters": n + 1}, (), rest)
    if t.family in ("B", "D"):
        target = reduce_BD(t)
        child = _derive(catalog(target.label), p, max(degrees), cfg)
        vals = {k: child.value(k) for k in degrees if k in child.resolved}
        res = set(vals)
        rest = _fallback(m, p, [k for k in degrees if k not in res], cfg, label)
        return _node("Reduce" + t.family, label, p, degrees, vals, res,
                     {"target": target.label}, (child,), rest)
    if t.family == "I":
        vals = {k: dihedral_homology(t.q, p, k) for k in degrees}
        return _node("Dihedral", label, p, degrees, vals, set(degrees), {"q": t.q})
    T = transfer_reduction(m, p)
    if T is not None:
        child = _derive(m.restrict(T), p, max(degrees), cfg)
        zero = {k for k in degrees if k in child.resolved and child.value(k).trivial}
        rest = _fallback(m, p, [k for k in degrees if k not in zero], cfg, label)
        return _node("TransferToParabolic", label, p, degrees, {}, zero,
                     {"parabolic": list(T), "index": group_order(m).value // group_order(m.restrict(T)).value},
                     (child,), rest)
    return _fallback(m, p, degrees, cfg, label)


@lru_cache(maxsize=4096)
def _derive(m: CoxeterMatrix, p: int, kmax: int, cfg: EngineConfig) -> Derivation:
    degrees = tuple(range(1, kmax + 1))
    d = decompose(m)
    label = d.label
    if m.n == 0 or not has_p_torsion(m, p):
        return _node("NoPTorsion", label, p, degrees, {}, set(degrees), {"matrix": m.to_text()})
    if len(d.components) > 1:
        children = [_derive(m.restrict(c.generators), p, kmax, cfg) for c in d.components]
        prefix = min(_prefix(c.resolved, degrees) for c in children)
        acc = GradedPLocal.trivial(p)
        for c in children:
            acc = kunneth(acc, GradedPLocal.build(p, {k: c.value(k) for k in c.resolved}, prefix), prefix)
        res = set(range(1, prefix + 1))
        vals = {k: acc[k] for k in res}
        rest = _fallback(m, p, [k for k in degrees if k not in res], cfg, label)
        return _node("Kunneth", label, p, degrees, vals, res,
                     {"components": [list(c.generators) for c in d.components]}, children, rest)
    t = d.components[0].type
    if t.finite:
        return _component_node(m, p, degrees, cfg, t, label)
    if is_aspherical(m):
        children = []
        for s, u, lab in m.labels():
            if lab is not INF and lab % p == 0:
                children.append(_derive(m.restrict((s, u)), p, kmax, cfg))
        vals = {}
        for k in degrees:
            g = PGroup(p)
            if k > 2:
                for c in children:
                    g = g + c.value(k)
            vals[k] = g
        return _node("AsphericalSum", label, p, degrees, vals, set(degrees),
                     {"edges": [[s, u, lab] for s, u, lab in m.labels() if lab is not INF and lab % p == 0]},
                     children)
    return _fallback(m, p, degrees, cfg, label)


_lock = threading.Lock()


def derive_homology(m: CoxeterMatrix, p: int, kmax: int | None = None,
                    config: EngineConfig | None = None) -> Derived:
    """H_k(W, Z_(p)) for 1 <= k <= kmax with the derivation that produced it."""
    check_odd_prime(p)
    if kmax is None:
        kmax = 2 * (p - 2)
    if not 1 <= kmax <= KMAX_CAP:
        raise ValueError(f"kmax must lie in 1..{KMAX_CAP}")
    cfg = config or EngineConfig()
    with _lock:
        d = _derive(m, p, kmax, cfg)
    return Derived(d.homology(), d, frozenset(d.unresolved))


# --------------------------------------------------------------------------
# the vanishing theorem

@dataclass(frozen=True)
class VanishingReport:
    group: str
    p: int
    p_free: bool
    status: str  # PASS, FAIL or INCONCLUSIVE over degrees 1..2(p-2)
    top: int
    homology: GradedPLocal
    unresolved: tuple
    sharpness_degree: int
    sharpness: PGroup | None  # H_{2p-3}, when resolved
    derivation: Derivation = field(repr=False)

    @property
    def nonzero(self):
        return [(k, g) for k, g in self.homology.groups if k <= self.top]

    def summary(self):
        head = f"{self.group} p={self.p}: "
        if not self.p_free:
            head += "hypothesis violated (not p-free); "
        head += self.status
        if self.nonzero:
            head += "; " + ", ".join(f"H_{k} = {g}" for k, g in self.nonzero)
        if self.sharpness is not None and not self.sharpness.trivial:
            head += f"; H_{self.sharpness_degree} = {self.sharpness}"
            if self.p_free:
                head += " (range is best possible)"
        return head


PROBE_MAX_ELEMS = 200_000


def verify_vanishing_theorem(m: CoxeterMatrix, p: int, config: EngineConfig | None = None) -> VanishingReport:
    """Check H_k(W, Z_(p)) = 0 for 1 <= k <= 2(p-2) and probe degree 2p-3.

    The probe only uses enumeration for groups of modest size; it is a
    sharpness illustration, not part of the verdict.
    """
    check_odd_prime(p)
    cfg = config or EngineConfig()
    top = 2 * (p - 2)
    probe = 2 * p - 3
    res = derive_homology(m, p, top, cfg)
    inside = sorted(res.unresolved)
    if not res.homology.vanishes(1, top):
        status = "FAIL"
    elif inside:
        status = "INCONCLUSIVE"
    else:
        status = "PASS"
    probe_cfg = EngineConfig(min(cfg.max_elems, PROBE_MAX_ELEMS), cfg.enumerate)
    pr = derive_homology(m, p, probe, probe_cfg)
    sharp = None if probe in pr.unresolved else pr.homology[probe]
    return VanishingReport(decompose(m).label, p, is_p_free(m, p), status, top, res.homology,
                           tuple(inside), probe, sharp, res.derivation)
