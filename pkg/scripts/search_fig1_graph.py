"""Search for the six-cell, two-edge-type fixture with an exotic pattern.

Wanted: homogeneous, Aut(G) = <(12)(36)(45)> exactly, and {1,4},{2,5},{3,6}
balanced (hence exotic).  Step 1 shows that no bidirected graph qualifies;
step 2 searches sigma-invariant graphs where each cell has ``ka`` inputs of
type "a" and ``kb`` of type "b", ranked by how many couplings are two-way.
"""
import itertools

from synchrony_lab.automorphism import Permutation, detect_exotic, find_automorphisms
from synchrony_lab.graph_model import NetworkGraph, classify
from synchrony_lab.synchrony import Partition, is_balanced

N = 6
SIGMA = Permutation.from_cycles([(1, 2), (3, 6), (4, 5)], N)
TARGET = Partition.from_classes([[1, 4], [2, 5], [3, 6]], N)
ORBIT_REPS = [0, 2, 3]


def regular_graphs(pool, d):
    for comb in itertools.combinations(pool, d * N // 2):
        deg = [0] * N
        for u, v in comb:
            deg[u] += 1
            deg[v] += 1
        if all(x == d for x in deg):
            yield comb


def bidirected_exotic_count():
    pairs = list(itertools.combinations(range(N), 2))
    hits = 0
    for da in range(1, 5):
        for a in regular_graphs(pairs, da):
            rest = [p for p in pairs if p not in a]
            for db in range(1, 6 - da):
                for b in regular_graphs(rest, db):
                    g = NetworkGraph(N, ("c",) * N,
                                     tuple((u, v, "a") for u, v in a) + tuple((u, v, "b") for u, v in b))
                    if is_balanced(g, TARGET) and not detect_exotic(g, TARGET).symmetric:
                        hits += 1
    return hits


def sigma_inputs(k):
    per = [list(itertools.combinations([d for d in range(N) if d != r], k)) for r in ORBIT_REPS]
    for combo in itertools.product(*per):
        inputs = [None] * N
        for r, srcs in zip(ORBIT_REPS, combo):
            inputs[r] = set(srcs)
            inputs[SIGMA(r)] = {SIGMA(s) for s in srcs}
        yield inputs


def build(inputs_by_class):
    edges, arrows = [], []
    for cls, inputs in inputs_by_class.items():
        for c in range(N):
            for s in inputs[c]:
                if c in inputs[s]:
                    if s < c:
                        edges.append((s, c, cls))
                else:
                    arrows.append((s, c, cls))
    return NetworkGraph(N, ("c",) * N, tuple(edges), None, tuple(arrows))


def main():
    print("bidirected graphs with the pattern exotic:", bidirected_exotic_count())
    hits = []
    for ka, kb in [(1, 1), (1, 2), (2, 2)]:
        for a in sigma_inputs(ka):
            for b in sigma_inputs(kb):
                if any(a[c] & b[c] for c in range(N)):
                    continue
                g = build({"a": a, "b": b})
                if classify(g) == "nonhomogeneous" or not is_balanced(g, TARGET):
                    continue
                if find_automorphisms(g).order != 2:
                    continue
                hits.append((len(g.arrows), g.edges, g.arrows))
    hits.sort()
    print(f"{len(hits)} directed candidates; fewest one-way arrows first:")
    for n_arrows, edges, arrows in hits[:5]:
        print(n_arrows,
              [f"{u + 1}-{v + 1}:{c}" for u, v, c in edges],
              [f"{t + 1}->{h + 1}:{c}" for t, h, c in arrows])


if __name__ == "__main__":
    main()
