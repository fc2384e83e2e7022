"""Degree 2p-3 across symmetric groups and p-free groups: where the
vanishing range stops, and which groups reach that degree first.

    python scripts/sharpness.py --primes 3 5 7 11
"""
import argparse

from coxhom.coxeter import catalog, decompose, is_p_free
from coxhom.groups import cyclic_sylow_of
from coxhom.plocal import derive_homology


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--primes", type=int, nargs="+", default=[3, 5, 7, 11])
    args = ap.parse_args()

    for p in args.primes:
        top, probe = 2 * (p - 2), 2 * p - 3
        print(f"p = {p}: vanishing through degree {top}, probe degree {probe}")
        for n in range(p - 2, 2 * p + 1):
            if n < 1:
                continue
            m = catalog(f"A{n}")
            r = derive_homology(m, p, probe)
            first = next((k for k in range(1, probe + 1) if k not in r.unresolved and not r.homology[k].trivial), None)
            note = ""
            if n == p - 1:
                syl = cyclic_sylow_of(m, p)
                note = f"  (normalizer acts through {syl.e} of the {p - 1} units)"
            value = "unresolved" if probe in r.unresolved else str(r.homology[probe])
            print(f"  S_{n + 1:<3} H_{probe} = {value:<10} first nonzero degree: {first}{note}")
        for name in ["I2(7)", "I2(11)", "H3", "E6", "F4", "B5"]:
            m = catalog(name)
            if not is_p_free(m, p):
                continue
            r = derive_homology(m, p, probe)
            value = "unresolved" if probe in r.unresolved else str(r.homology[probe])
            print(f"  {decompose(m).label:<6} H_{probe} = {value}")


if __name__ == "__main__":
    main()
