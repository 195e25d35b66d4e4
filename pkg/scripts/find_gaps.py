#!/usr/bin/env python3
"""Hunt for instances where the bounds disagree with the linear optimum.

Interesting finds are printed as instance JSON:
  lower-gap:  exhaustive lower bound < linear optimum
              (the grounding argument is not tight here)
  upper-gap:  linear optimum < pairwise-tree upper bound
              (pairwise XOR coding is suboptimal here)
"""

import argparse
import json
import random
import sys

from msindex.bound import lower_bound, run_grounding
from msindex.code import find_connecting_trees, upper_bound
from msindex.generate import random_cycle_instance, random_instance
from msindex.model import ProblemInstance, build_graphs, simplify
from msindex.verify import oracle_min_linear


def random_pairing_instance(rng, m):
    """Wants from disjoint 2-cycles, senders owning random pairs/triples;
    the densest source of semi leaf SCCs."""
    m -= m % 2
    order = list(range(1, m + 1))
    rng.shuffle(order)
    wants = [set() for _ in range(m)]
    for a, b in zip(order[0::2], order[1::2]):
        wants[a - 1].add(b)
        wants[b - 1].add(a)
    senders = []
    for _ in range(rng.randint(2, m)):
        size = rng.randint(2, 3)
        senders.append(set(rng.sample(range(1, m + 1), size)))
    covered = set().union(*senders)
    for msg in range(1, m + 1):
        if msg not in covered:
            senders[rng.randrange(len(senders))].add(msg)
    return ProblemInstance(num_messages=m,
                           senders=tuple(frozenset(s) for s in senders),
                           wants=tuple(frozenset(w) for w in wants))


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--count", type=int, default=2000)
    ap.add_argument("--max-m", type=int, default=6)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--stop-after", type=int, default=5,
                    help="stop once this many gaps are printed")
    args = ap.parse_args()

    rng = random.Random(args.seed)
    printed = 0
    for k in range(args.count):
        m = rng.randint(4, args.max_m)
        roll = rng.random()
        if roll < 0.6:
            inst = random_pairing_instance(rng, m)
        elif roll < 0.85:
            inst = random_cycle_instance(rng, m, sender_size=rng.randint(2, 3))
        else:
            inst = random_instance(rng, m)
        simple, _ = simplify(inst)
        g = build_graphs(simple)
        lb = lower_bound(run_grounding(g, "exhaustive"))
        ub = upper_bound(g, find_connecting_trees(g, "exact"))
        if lb == ub:
            continue
        opt, _ = oracle_min_linear(simple)
        kinds = []
        if lb < opt:
            kinds.append("lower-gap")
        if opt < ub:
            kinds.append("upper-gap")
        if not kinds:
            continue
        printed += 1
        print(f"# {'+'.join(kinds)}: lower={lb} linear-optimal={opt} upper={ub}")
        print(json.dumps(inst.to_document(), sort_keys=True))
        if printed >= args.stop_after:
            break
    print(f"# scanned {k + 1} instances, printed {printed} gaps")
    return 0


if __name__ == "__main__":
    sys.exit(main())
