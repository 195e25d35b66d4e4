"""Seeded random instance generators for experiments and tests."""

from __future__ import annotations

import random

from .model import ProblemInstance


def random_instance(rng: random.Random, num_messages: int,
                    want_prob: float = 0.35,
                    max_senders: int | None = None) -> ProblemInstance:
    """A random uniprior multicast instance with every message owned
    somewhere.  Wants are independent coin flips; sender sets are random
    nonempty subsets patched to cover all messages."""
    m = num_messages
    wants = []
    for r in range(1, m + 1):
        wants.append(frozenset(
            j for j in range(1, m + 1) if j != r and rng.random() < want_prob))

    n_senders = rng.randint(1, max_senders or m)
    senders = []
    for _ in range(n_senders):
        size = rng.randint(1, m)
        senders.append(set(rng.sample(range(1, m + 1), size)))
    covered = set().union(*senders)
    for msg in range(1, m + 1):
        if msg not in covered:
            senders[rng.randrange(n_senders)].add(msg)
    return ProblemInstance(num_messages=m,
                           senders=tuple(frozenset(s) for s in senders),
                           wants=tuple(wants))


def random_cycle_instance(rng: random.Random, num_messages: int,
                          sender_size: int = 2) -> ProblemInstance:
    """Wants drawn from a random permutation (every cycle becomes a leaf
    SCC), senders owning small random sets.  This is the regime where
    leaf-SCC classification actually varies."""
    m = num_messages
    perm = list(range(1, m + 1))
    rng.shuffle(perm)
    wants = [set() for _ in range(m)]
    for i, target in zip(range(1, m + 1), perm):
        if target != i:
            wants[target - 1].add(i)

    senders = []
    n_senders = rng.randint(1, max(1, m))
    for _ in range(n_senders):
        size = min(m, rng.randint(1, max(1, sender_size)))
        senders.append(set(rng.sample(range(1, m + 1), size)))
    covered = set().union(*senders)
    for msg in range(1, m + 1):
        if msg not in covered:
            senders[rng.randrange(n_senders)].add(msg)
    return ProblemInstance(num_messages=m,
                           senders=tuple(frozenset(s) for s in senders),
                           wants=tuple(frozenset(w) for w in wants))


def random_partitioned_instance(rng: random.Random, num_messages: int,
                                want_prob: float = 0.35) -> ProblemInstance:
    """Like random_instance, but sender sets partition the messages (no
    message is owned twice)."""
    m = num_messages
    wants = []
    for r in range(1, m + 1):
        wants.append(frozenset(
            j for j in range(1, m + 1) if j != r and rng.random() < want_prob))

    order = list(range(1, m + 1))
    rng.shuffle(order)
    n_senders = rng.randint(1, m)
    cuts = sorted(rng.sample(range(1, m), n_senders - 1)) if n_senders > 1 else []
    senders = []
    last = 0
    for cut in cuts + [m]:
        senders.append(frozenset(order[last:cut]))
        last = cut
    return ProblemInstance(num_messages=m, senders=tuple(senders),
                           wants=tuple(wants))


__all__ = ["random_instance", "random_cycle_instance",
           "random_partitioned_instance"]
