"""Build Coxeter complexes and check the sphere, base-row and orientation
properties, with timings.

    python scripts/sphere_checks.py A3 B4 H3 F4 A5 D5
    python scripts/sphere_checks.py --export-dir out/ A3
"""
import argparse
import time
from pathlib import Path

from coxhom.complex import (build_complex, complex_homology, euler_characteristic, export_triplets,
                            generator_action_on_top, orbit_chain_complex)
from coxhom.coxeter import catalog
from coxhom.homalg import chain_homology, point_homology, sphere_homology

DEFAULT = ["A1", "A2", "A3", "A4", "B3", "B4", "D4", "F4", "H3", "I2(7)", "A5", "B5", "D5"]


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("groups", nargs="*", default=DEFAULT)
    ap.add_argument("--export-dir", type=Path)
    args = ap.parse_args()

    for name in args.groups:
        t = time.perf_counter()
        X = build_complex(catalog(name))
        n = X.m.n
        sphere = complex_homology(X) == sphere_homology(n - 1)
        point = chain_homology(orbit_chain_complex(X)) == point_homology(n - 1)
        acts = {generator_action_on_top(X, s) for s in range(n)}
        dt = time.perf_counter() - t
        print(f"{name:<7} f={X.f_vector} χ={euler_characteristic(X)} sphere={sphere} "
              f"orbit-point={point} actions={sorted(acts)}  {dt:.2f}s")
        if args.export_dir:
            args.export_dir.mkdir(parents=True, exist_ok=True)
            (args.export_dir / f"{name}.triplets").write_text(export_triplets(X))


if __name__ == "__main__":
    main()
