"""Exotic synchrony census for rings and nearest/next-nearest circulants.

    python3 scripts/exotic_census.py [--max-ring 10] [--max-gn 11]
"""
import argparse
import time

from synchrony_lab.automorphism import detect_exotic, find_automorphisms
from synchrony_lab.graph_model import make_Gn, make_ring
from synchrony_lab.synchrony import enumerate_synchrony


def census(g):
    group = find_automorphisms(g)
    patterns = enumerate_synchrony(g).patterns
    exotic = [p for p in patterns if not detect_exotic(g, p, group).symmetric]
    return group.order, len(patterns), exotic


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--max-ring", type=int, default=10)
    ap.add_argument("--max-gn", type=int, default=11)
    ap.add_argument("--show", action="store_true", help="print every exotic pattern")
    args = ap.parse_args()
    graphs = [(f"ring{n}", make_ring(n)) for n in range(3, args.max_ring + 1)]
    graphs += [(f"g{n}", make_Gn(n)) for n in range(5, args.max_gn + 1)]
    print(f"{'graph':<8} {'|Aut|':>6} {'balanced':>9} {'exotic':>7} {'seconds':>8}")
    for name, g in graphs:
        t0 = time.perf_counter()
        order, total, exotic = census(g)
        print(f"{name:<8} {order:>6} {total:>9} {len(exotic):>7} {time.perf_counter() - t0:>8.2f}")
        if args.show:
            for p in exotic:
                print(f"    {p}")


if __name__ == "__main__":
    main()
