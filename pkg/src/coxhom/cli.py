"""Command line: classify, table, homology, complex, verify.

Exit codes: 0 success, 1 a p-free pair FAILED, 2 a p-free pair was
INCONCLUSIVE, 3 usage or input error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .complex import (ComplexError, build_complex, complex_homology, euler_characteristic,
                      export_triplets, generator_action_on_top, orbit_chain_complex)
from .coxeter import (CoxeterError, CoxeterMatrix, ParseError, catalog, check_odd_prime, decompose,
                      group_order, is_aspherical, odd_graph_components, parse_coxeter)
from .groups import DEFAULT_MAX_ELEMS, DEFAULT_MAX_ROWS, BudgetExceeded
from .homalg import chain_homology, sphere_homology, point_homology, top_coinvariants
from .plocal import KMAX_CAP, EngineConfig, derive_homology, verify_vanishing_theorem
from .table import golden_table, p_free_description, render_table

EXIT_OK, EXIT_FAIL, EXIT_INCONCLUSIVE, EXIT_USAGE = 0, 1, 2, 3
FORMATS = ("text", "json", "csv")


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class Config:
    max_elems: int = DEFAULT_MAX_ELEMS
    max_simplices: int = 5_000_000
    max_coset_rows: int = DEFAULT_MAX_ROWS
    format: str = "text"
    corpus: str = "default"

    def __post_init__(self):
        if min(self.max_elems, self.max_simplices, self.max_coset_rows) < 1:
            raise UsageError("budgets must be positive")
        if self.format not in FORMATS:
            raise UsageError(f"unknown format {self.format!r}")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def load_group(spec: str) -> tuple[str, CoxeterMatrix]:
    """A graph file, ``-`` for stdin, or a catalog name such as ``B3xA1``."""
    if spec == "-":
        return "stdin", parse_coxeter(sys.stdin.read())
    path = Path(spec)
    if path.is_file():
        return path.name, parse_coxeter(path.read_text())
    return spec, catalog(spec)


def load_corpus(name: str):
    """List of (display name, matrix) for a corpus in the shipped config."""
    data = json.loads(resources.files("coxhom").joinpath("data/corpus.json").read_text(encoding="utf-8"))
    corpora = data["corpora"]
    if name not in corpora:
        raise UsageError(f"unknown corpus {name!r}; known: {', '.join(sorted(corpora))}")
    entry = corpora[name]
    out = load_corpus(entry["extends"]) if "extends" in entry else []
    for g in entry["groups"]:
        if isinstance(g, str):
            out.append((g, catalog(g)))
        else:
            out.append((g["name"], parse_coxeter(g["text"])))
    return out


def corpus_primes():
    data = json.loads(resources.files("coxhom").joinpath("data/corpus.json").read_text(encoding="utf-8"))
    return list(data["primes"])


def _emit(rows, fmt, fields, text_line):
    if fmt == "json":
        return json.dumps(rows, ensure_ascii=False, indent=1, sort_keys=True) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n", extrasaction="ignore")
        w.writeheader()
        for r in rows:
            w.writerow({k: (json.dumps(v, ensure_ascii=False) if isinstance(v, (list, dict)) else v)
                        for k, v in r.items()})
        return buf.getvalue()
    return "".join(text_line(r) + "\n" for r in rows)


# --------------------------------------------------------------------------
# commands

def cmd_classify(args, cfg):
    name, m = load_group(args.group)
    d = decompose(m)
    o = group_order(m)
    order_text = str(o)
    if len(o.factors) > 1:
        order_text += f" = {o.format_factors()}"
    row = {
        "input": name,
        "type": d.label,
        "components": [{"type": c.type.label, "generators": list(c.generators)} for c in d.components],
        "order": None if o.infinite else o.value,
        "factored": o.format_factors(),
        "p_free": p_free_description(m),
        "aspherical": is_aspherical(m),
        "n1": odd_graph_components(m),
        "matrix": m.to_json(),
    }

    def text(r):
        lines = [f"{r['type']} | {order_text} | p-free: {r['p_free']}"]
        for c in r["components"]:
            lines.append(f"  component {c['type']} on generators {c['generators']}")
        lines.append(f"  aspherical: {'yes' if r['aspherical'] else 'no'}")
        lines.append(f"  n1 (Z/2 summands of H_1): {r['n1']}")
        return "\n".join(lines)

    sys.stdout.write(_emit([row], cfg.format, ["input", "type", "order", "factored", "p_free", "aspherical", "n1"], text))
    return EXIT_OK


def cmd_table(args, cfg):
    out = render_table()
    if args.check and out != golden_table():
        sys.stderr.write("table differs from the shipped golden file\n")
        return EXIT_FAIL
    if cfg.format == "text":
        sys.stdout.write(out)
        return EXIT_OK
    lines = out.splitlines()
    header = [h.strip() for h in lines[0].split(" | ")]
    rows = [dict(zip(header, line.split(" | "))) for line in lines[1:]]
    sys.stdout.write(_emit(rows, cfg.format, header, None))
    return EXIT_OK


def cmd_homology(args, cfg):
    name, m = load_group(args.group)
    check_odd_prime(args.p)
    kmax = args.kmax if args.kmax is not None else 2 * (args.p - 2)
    res = derive_homology(m, args.p, kmax, EngineConfig(cfg.max_elems))
    rows = []
    for k in range(1, kmax + 1):
        resolved = k not in res.unresolved
        rows.append({"k": k, "group": str(res.homology[k]) if resolved else "unresolved",
                     "exponents": list(res.homology[k].exponents), "resolved": resolved})
    if cfg.format == "json":
        payload = {"group": decompose(m).label, "p": args.p, "kmax": kmax, "degrees": rows,
                   "unresolved": sorted(res.unresolved)}
        if args.trace:
            payload["derivation"] = res.derivation.to_json()
        sys.stdout.write(json.dumps(payload, ensure_ascii=False, indent=1, sort_keys=True) + "\n")
    else:
        sys.stdout.write(_emit(rows, cfg.format, ["k", "group", "resolved"], lambda r: f"{r['k']}: {r['group']}"))
        if args.trace:
            sys.stdout.write(res.derivation.dumps() + "\n")
    if res.unresolved:
        sys.stderr.write(f"unresolved degrees: {sorted(res.unresolved)}\n")
    return EXIT_OK


def cmd_complex(args, cfg):
    name, m = load_group(args.group)
    X = build_complex(m, cfg.max_simplices, cfg.max_coset_rows)
    row = {"type": decompose(m).label, "f_vector": list(X.f_vector), "euler": euler_characteristic(X)}
    ok = True
    if args.homology:
        H = complex_homology(X)
        row["homology"] = str(H)
        row["sphere"] = H == sphere_homology(m.n - 1)
        ok &= row["sphere"]
    if args.orbit_check:
        H = chain_homology(orbit_chain_complex(X))
        row["orbit_homology"] = str(H)
        row["orbit_point"] = H == point_homology(m.n - 1)
        ok &= row["orbit_point"]
    if args.action_check:
        acts = [generator_action_on_top(X, s) for s in range(m.n)]
        row["actions"] = acts
        row["coinvariants"] = {str(p): str(top_coinvariants(X, p)) for p in (3, 5, 7)}
        ok &= all(a == -1 for a in acts)
    if args.export:
        Path(args.export).write_text(export_triplets(X))
        row["export"] = args.export

    def text(r):
        parts = [f"{r['type']}: f={tuple(r['f_vector'])}, χ={r['euler']}"]
        if "homology" in r:
            parts.append(f"H={r['homology']}" + ("" if r["sphere"] else " (NOT a sphere)"))
        if "orbit_homology" in r:
            parts.append(f"orbit H={r['orbit_homology']}" + ("" if r["orbit_point"] else " (NOT a point)"))
        if "actions" in r:
            parts.append("actions " + ",".join(map(str, r["actions"])))
            parts.append("coinvariants " + ",".join(f"p={p}:{g}" for p, g in r["coinvariants"].items()))
        return "\n  ".join(parts)

    sys.stdout.write(_emit([row], cfg.format, ["type", "f_vector", "euler", "homology", "orbit_homology", "actions"], text))
    return EXIT_OK if ok else EXIT_FAIL


def _verify_one(item):
    name, m, p, max_elems = item
    t = time.perf_counter()
    r = verify_vanishing_theorem(m, p, EngineConfig(max_elems))
    return {
        "group": name,
        "type": r.group,
        "p": p,
        "p_free": r.p_free,
        "status": r.status,
        "nonzero": {str(k): str(g) for k, g in r.nonzero},
        "unresolved": [k for k in r.unresolved if k <= r.top],
        "probe_degree": r.sharpness_degree,
        "probe": None if r.sharpness is None else str(r.sharpness),
        "summary": r.summary(),
        "seconds": round(time.perf_counter() - t, 3),
    }


def cmd_verify(args, cfg):
    corpus = load_corpus(cfg.corpus)
    if args.big and cfg.corpus == "default":
        corpus = load_corpus("big")
    primes = args.p or corpus_primes()
    for p in primes:
        check_odd_prime(p)
    items = [(name, m, p, cfg.max_elems) for name, m in corpus for p in primes]
    if args.jobs > 1:
        with ProcessPoolExecutor(args.jobs) as ex:
            rows = list(ex.map(_verify_one, items))
    else:
        rows = [_verify_one(it) for it in items]
    if not args.timing:
        for r in rows:
            r.pop("seconds")

    def text(r):
        line = r["summary"]
        return line + (f"  [{r['seconds']:.2f}s]" if "seconds" in r else "")

    sys.stdout.write(_emit(rows, cfg.format, ["group", "type", "p", "p_free", "status", "nonzero", "unresolved",
                                              "probe_degree", "probe", "seconds"], text))
    free = [r for r in rows if r["p_free"]]
    fails = sum(r["status"] == "FAIL" for r in free)
    inconclusive = sum(r["status"] == "INCONCLUSIVE" for r in free)
    if cfg.format == "text":
        sys.stdout.write(f"{len(free)} p-free pairs: {len(free) - fails - inconclusive} PASS, {fails} FAIL, "
                         f"{inconclusive} INCONCLUSIVE; {len(rows) - len(free)} pairs outside the hypothesis\n")
    if fails:
        return EXIT_FAIL
    if inconclusive:
        return EXIT_INCONCLUSIVE
    return EXIT_OK


# --------------------------------------------------------------------------

def build_parser():
    ap = _Parser(prog="coxhom", description="p-local homology of Coxeter groups at odd primes")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=FORMATS, default="text")
    common.add_argument("--max-elems", type=int, default=DEFAULT_MAX_ELEMS,
                        help="element budget for group enumeration")
    common.add_argument("--max-simplices", type=int, default=5_000_000)
    common.add_argument("--max-coset-rows", type=int, default=DEFAULT_MAX_ROWS)
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("classify", parents=[common], help="type, order and p-freeness of a Coxeter graph")
    p.add_argument("group", help="graph file, '-' for stdin, or a catalog name like E6 or B3xA1")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("table", parents=[common], help="order and p-freeness table of the finite irreducible types")
    p.add_argument("--check", action="store_true", help="compare with the shipped golden file")
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("homology", parents=[common], help="H_k(W, Z_(p)) with an optional derivation")
    p.add_argument("group")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--kmax", type=int, choices=range(1, KMAX_CAP + 1), metavar=f"1..{KMAX_CAP}")
    p.add_argument("--trace", action="store_true", help="print the derivation certificate")
    p.set_defaults(func=cmd_homology)

    p = sub.add_parser("complex", parents=[common], help="Coxeter complex of a finite group")
    p.add_argument("group")
    p.add_argument("--homology", action="store_true")
    p.add_argument("--orbit-check", action="store_true")
    p.add_argument("--action-check", action="store_true")
    p.add_argument("--export", metavar="PATH", help="write boundary matrices as 'k row col value' triplets")
    p.set_defaults(func=cmd_complex)

    p = sub.add_parser("verify", parents=[common], help="check the vanishing range on a corpus")
    p.add_argument("--corpus", default="default")
    p.add_argument("--p", type=int, action="append", help="prime to test (repeatable)")
    p.add_argument("--big", action="store_true", help="include the large groups (E7)")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--timing", action="store_true", help="include per-pair timings")
    p.set_defaults(func=cmd_verify)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = Config(args.max_elems, args.max_simplices, args.max_coset_rows, args.format,
                     getattr(args, "corpus", "default"))
        return args.func(args, cfg)
    except ParseError as exc:
        sys.stderr.write(f"parse error: {exc}\n")
    except (UsageError, CoxeterError, ValueError) as exc:
        sys.stderr.write(f"error: {exc}\n")
    except (ComplexError, BudgetExceeded) as exc:
        sys.stderr.write(f"error: {exc}\n")
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
