"""Achievability: connecting trees, spanning trees, and XOR code assembly.

The constructive upper bound transmits one XOR per edge of certain trees
in the message graph and sends every remaining non-leaf message uncoded.
A connecting tree is a tree in the message graph whose vertex set
(a) contains only vertices with outgoing arcs, (b) has no arc leaving it,
and (c) avoids message-connected leaf SCCs and other connecting trees.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from itertools import combinations

from . import graphs
from .model import GraphPair, ProblemInstance


@dataclass(frozen=True)
class Tree:
    vertices: frozenset[int]
    edges: tuple[tuple[int, int], ...]


@dataclass(frozen=True)
class CodeBlueprint:
    connecting_trees: tuple[Tree, ...]
    scc_spanning_trees: tuple[Tree, ...]
    uncoded: tuple[int, ...]

    @property
    def length(self) -> int:
        return (sum(len(t.edges) for t in self.connecting_trees)
                + sum(len(t.edges) for t in self.scc_spanning_trees)
                + len(self.uncoded))


@dataclass(frozen=True)
class CodeRow:
    """One transmitted bit: a GF(2) combination of one sender's messages.

    ``coeffs`` is a bitmask; bit (i-1) set means message i participates.
    """

    sender: int
    coeffs: int
    kind: str | None = None

    def support(self) -> frozenset[int]:
        return frozenset(i + 1 for i in range(self.coeffs.bit_length())
                         if (self.coeffs >> i) & 1)

    def coeff_list(self, m: int) -> list[int]:
        return [(self.coeffs >> i) & 1 for i in range(m)]


@dataclass(frozen=True)
class LinearIndexCode:
    num_messages: int
    rows: tuple[CodeRow, ...]

    @property
    def length(self) -> int:
        return len(self.rows)


def mask_of(indices) -> int:
    mask = 0
    for i in indices:
        mask |= 1 << (i - 1)
    return mask


def _closed_under_arcs(g: GraphPair, vs: frozenset[int]) -> bool:
    return all(j in vs for (i, j) in g.arcs if i in vs)


def _spanning_tree(g: GraphPair, vs: frozenset[int]) -> tuple[tuple[int, int], ...]:
    """Kruskal over lexicographically sorted edges; input must induce a
    connected message subgraph."""
    parent = {v: v for v in vs}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    chosen = []
    for i, j in sorted(g.edges):
        if i not in parent or j not in parent:
            continue
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[ri] = rj
            chosen.append((i, j))
    if len(chosen) != len(vs) - 1:
        raise ValueError(f"{sorted(vs)} does not induce a connected message subgraph")
    return tuple(chosen)


def _tree_candidates(g: GraphPair, excluded: frozenset[int]) -> list[frozenset[int]]:
    """All valid connecting-tree vertex sets, sorted lexicographically."""
    eligible = sorted(set(g.vertices()) - graphs.leaf_vertices(g) - excluded)
    found = []
    for r in range(2, len(eligible) + 1):
        for combo in combinations(eligible, r):
            vs = frozenset(combo)
            if not _closed_under_arcs(g, vs):
                continue
            if not graphs.u_connected_within(g, vs):
                continue
            found.append(vs)
    found.sort(key=sorted)
    return found


def _max_packing(candidates: list[frozenset[int]]) -> list[frozenset[int]]:
    """Exact maximum set packing, lexicographically smallest family."""
    universe = frozenset().union(*candidates) if candidates else frozenset()
    memo: dict[frozenset[int], int] = {}

    def best(remaining: frozenset[int]) -> int:
        if remaining in memo:
            return memo[remaining]
        usable = [c for c in candidates if c <= remaining]
        if not usable:
            memo[remaining] = 0
            return 0
        v = min(frozenset().union(*usable))
        score = best(remaining - {v})
        for c in usable:
            if v in c:
                score = max(score, 1 + best(remaining - c))
        memo[remaining] = score
        return score

    chosen: list[frozenset[int]] = []
    remaining = universe
    while best(remaining) > 0:
        target = best(remaining)
        for c in candidates:
            if c <= remaining and 1 + best(remaining - c) == target:
                chosen.append(c)
                remaining = remaining - c
                break
    return chosen


def find_connecting_trees(g: GraphPair, mode: str = "exact",
                          exact_limit: int = 16) -> list[Tree]:
    """Vertex-disjoint connecting trees; exact mode maximizes their number.

    Exact search enumerates every arc-closed, non-leaf, SCC-excluded vertex
    set inducing a connected message subgraph, then solves the max
    set-packing over them.  Above ``exact_limit`` vertices (or in greedy
    mode) the family is grown from per-vertex reachability closures
    instead: maximal within that candidate class, possibly smaller than
    the exact optimum, and always valid for the upper bound.
    """
    if mode not in ("exact", "greedy"):
        raise ValueError(f"unknown mode {mode!r}")
    report = graphs.classify_all(g)
    excluded = frozenset().union(*(
        report.sccs[k] for k in report.leaf_sccs
        if report.classes[k] is graphs.LeafClass.MESSAGE_CONNECTED), frozenset())

    if mode == "exact" and g.n > exact_limit:
        warnings.warn(
            f"instance has {g.n} > {exact_limit} vertices; "
            "falling back to greedy connecting-tree search")
        mode = "greedy"

    if mode == "exact":
        sets = _max_packing(_tree_candidates(g, excluded))
    else:
        sets = _greedy_trees(g, excluded)
    return [Tree(vs, _spanning_tree(g, vs)) for vs in sets]


def _reach(g: GraphPair, v: int) -> frozenset[int]:
    seen = {v}
    frontier = [v]
    while frontier:
        u = frontier.pop()
        for w in g.out_neighbors(u):
            if w not in seen:
                seen.add(w)
                frontier.append(w)
    return frozenset(seen)


def _greedy_trees(g: GraphPair, excluded: frozenset[int]) -> list[frozenset[int]]:
    leaves = graphs.leaf_vertices(g)
    used: set[int] = set()
    out = []
    for v in g.vertices():
        if v in used or v in excluded or v in leaves:
            continue
        vs = _reach(g, v)
        if vs & (used | excluded) or vs & leaves:
            continue
        if len(vs) < 2 or not graphs.u_connected_within(g, vs):
            continue
        out.append(vs)
        used |= vs
    return out


def plan_code(g: GraphPair, trees: list[Tree]) -> CodeBlueprint:
    """Lay out the transmission plan: tree XORs, one spanning tree per
    message-connected leaf SCC, and the leftover non-leaf messages uncoded."""
    report = graphs.classify_all(g)
    scc_trees = []
    covered: set[int] = set()
    for t in trees:
        covered |= t.vertices
    for k in report.leaf_sccs:
        if report.classes[k] is not graphs.LeafClass.MESSAGE_CONNECTED:
            continue
        scc = report.sccs[k]
        scc_trees.append(Tree(scc, _spanning_tree(g, scc)))
        covered |= scc
    leaves = graphs.leaf_vertices(g)
    leftovers = [v for v in g.vertices()
                 if v not in covered and v not in leaves]
    return CodeBlueprint(connecting_trees=tuple(trees),
                         scc_spanning_trees=tuple(scc_trees),
                         uncoded=tuple(sorted(leftovers)))


def assign_senders(inst: ProblemInstance, blueprint: CodeBlueprint) -> LinearIndexCode:
    """Attach each planned bit to the smallest sender that can produce it."""
    def owner_of_pair(i: int, j: int) -> int:
        for s, ms in enumerate(inst.senders, start=1):
            if i in ms and j in ms:
                return s
        raise ValueError(f"no sender owns both messages {i} and {j}")

    def owner_of(i: int) -> int:
        for s, ms in enumerate(inst.senders, start=1):
            if i in ms:
                return s
        raise ValueError(f"no sender owns message {i}")

    rows = []
    for tree in blueprint.connecting_trees:
        for i, j in tree.edges:
            rows.append(CodeRow(owner_of_pair(i, j), mask_of((i, j)), "tree-xor"))
    for tree in blueprint.scc_spanning_trees:
        for i, j in tree.edges:
            rows.append(CodeRow(owner_of_pair(i, j), mask_of((i, j)), "scc-xor"))
    for i in blueprint.uncoded:
        rows.append(CodeRow(owner_of(i), mask_of((i,)), "uncoded"))
    return LinearIndexCode(inst.num_messages, tuple(rows))


def upper_bound(g: GraphPair, trees: list[Tree]) -> int:
    """Achievable codelength: V_out minus one per message-connected leaf SCC
    and one per connecting tree."""
    report = graphs.classify_all(g)
    n_connected = sum(
        1 for k in report.leaf_sccs
        if report.classes[k] is graphs.LeafClass.MESSAGE_CONNECTED)
    value = graphs.num_out_vertices(g) - (n_connected + len(trees))
    planned = plan_code(g, trees).length
    if planned != value:
        raise AssertionError(
            f"blueprint length {planned} != counted bound {value}")
    return value


__all__ = [
    "Tree", "CodeBlueprint", "CodeRow", "LinearIndexCode", "mask_of",
    "find_connecting_trees", "plan_code", "assign_senders", "upper_bound",
]
