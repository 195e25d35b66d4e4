#!/usr/bin/env python3
"""Random survey: how often do the bounds pin the optimum?

Draws random instances, runs both grounding modes, the exact connecting
tree search, and (when feasible) the brute-force linear oracle, then
tabulates tightness statistics.
"""

import argparse
import random
import sys

from msindex.bound import lower_bound, lower_bound_prune_all, run_grounding
from msindex.code import find_connecting_trees, upper_bound
from msindex.generate import (random_cycle_instance, random_instance,
                              random_partitioned_instance)
from msindex.model import build_graphs, simplify
from msindex.verify import ORACLE_LIMIT, oracle_min_linear


def draw(rng, style, max_m):
    m = rng.randint(2, max_m)
    if style == "cycle":
        return random_cycle_instance(rng, m, sender_size=rng.randint(2, 3))
    if style == "partitioned":
        return random_partitioned_instance(rng, m)
    if style == "mixed":
        return draw(rng, rng.choice(["plain", "cycle", "partitioned"]), max_m)
    return random_instance(rng, m)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--count", type=int, default=200)
    ap.add_argument("--max-m", type=int, default=6)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--style", default="mixed",
                    choices=["plain", "cycle", "partitioned", "mixed"])
    args = ap.parse_args()

    rng = random.Random(args.seed)
    stats = {"tight": 0, "gap": 0, "det_loose": 0, "prune_all_loose": 0,
             "oracle_at_lower": 0, "oracle_at_upper": 0, "oracle_between": 0}
    for k in range(args.count):
        inst = draw(rng, args.style, args.max_m)
        simple, _ = simplify(inst)
        g = build_graphs(simple)
        det = lower_bound(run_grounding(g, "deterministic"))
        exh = lower_bound(run_grounding(g, "exhaustive"))
        ub = upper_bound(g, find_connecting_trees(g, "exact"))
        stats["det_loose"] += det < exh
        stats["prune_all_loose"] += lower_bound_prune_all(g) < exh
        if exh == ub:
            stats["tight"] += 1
            continue
        stats["gap"] += 1
        if simple.num_messages <= ORACLE_LIMIT:
            opt, _ = oracle_min_linear(simple)
            if opt == exh:
                stats["oracle_at_lower"] += 1
            elif opt == ub:
                stats["oracle_at_upper"] += 1
            else:
                stats["oracle_between"] += 1

    print(f"instances: {args.count} (style={args.style}, m<=2..{args.max_m})")
    print(f"bounds meet outright:        {stats['tight']}")
    print(f"bounds leave a gap:          {stats['gap']}")
    print(f"  linear optimum = lower:    {stats['oracle_at_lower']}")
    print(f"  linear optimum = upper:    {stats['oracle_at_upper']}")
    print(f"  linear optimum in between: {stats['oracle_between']}")
    print(f"deterministic < exhaustive:  {stats['det_loose']}")
    print(f"prune-all < exhaustive:      {stats['prune_all_loose']}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
