"""Run the vanishing-range check over a corpus and print per-pair timings.

    python scripts/verify_corpus.py --corpus default --primes 3 5 7 11 13
    python scripts/verify_corpus.py --corpus big --out results.json
"""
import argparse
import json
import time

from coxhom.cli import corpus_primes, load_corpus
from coxhom.plocal import verify_vanishing_theorem


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--corpus", default="default")
    ap.add_argument("--primes", type=int, nargs="+", default=corpus_primes())
    ap.add_argument("--out", help="write the rows as JSON")
    args = ap.parse_args()

    rows = []
    start = time.perf_counter()
    for name, m in load_corpus(args.corpus):
        for p in args.primes:
            t = time.perf_counter()
            r = verify_vanishing_theorem(m, p)
            dt = time.perf_counter() - t
            rows.append({"group": name, "p": p, "p_free": r.p_free, "status": r.status,
                         "rules": sorted(r.derivation.rules_used()), "seconds": round(dt, 4)})
            print(f"{dt:8.3f}s  {r.summary()}")
    total = time.perf_counter() - start
    free = [r for r in rows if r["p_free"]]
    passed = sum(r["status"] == "PASS" for r in free)
    print(f"\n{passed}/{len(free)} p-free pairs PASS in {total:.1f}s")
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(rows, fh, indent=1)


if __name__ == "__main__":
    main()
