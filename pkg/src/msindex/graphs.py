"""SCC machinery and leaf-SCC classification against the message graph.

A leaf SCC is a strongly connected component with at least two vertices
and no arc leaving it.  Each leaf SCC falls into exactly one of four
classes depending on how the message graph connects its vertices:
message-connected, message-disconnected, or semi (degenerated or not).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from itertools import combinations

from .model import GraphPair


class LeafClass(enum.Enum):
    MESSAGE_CONNECTED = "MessageConnected"
    MESSAGE_DISCONNECTED = "MessageDisconnected"
    SEMI_DEGENERATED = "SemiDegenerated"
    SEMI_NON_DEGENERATED = "SemiNonDegenerated"


@dataclass(frozen=True)
class DegeneracyWitness:
    """Certificate that a semi leaf SCC is degenerated.

    ``part`` is one side of a no-edge-across bipartition of the SCC;
    ``cover`` is a vertex set outside the SCC with at most one non-leaf
    member such that every m-neighbor of ``part`` is in ``cover`` or is a
    predecessor of some vertex in ``cover``.  ``vacuous`` flags the corner
    case where ``part`` has no m-neighbors at all.
    """

    part: frozenset[int]
    cover: frozenset[int]
    vacuous: bool = False


@dataclass
class SccReport:
    sccs: list[frozenset[int]]
    leaf_sccs: list[int]
    classes: dict[int, LeafClass] = field(default_factory=dict)
    witnesses: dict[int, DegeneracyWitness] = field(default_factory=dict)


def scc_decompose(g: GraphPair) -> SccReport:
    """Partition vertices into SCCs (iterative Tarjan) and flag leaf SCCs.

    Components are returned sorted by smallest member; classes are left
    unfilled.
    """
    succ: dict[int, list[int]] = {v: [] for v in g.vertices()}
    for i, j in sorted(g.arcs):
        succ[i].append(j)

    index: dict[int, int] = {}
    lowlink: dict[int, int] = {}
    on_stack: set[int] = set()
    stack: list[int] = []
    counter = 0
    components: list[frozenset[int]] = []

    for root in g.vertices():
        if root in index:
            continue
        work = [(root, iter(succ[root]))]
        index[root] = lowlink[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if w not in index:
                    index[w] = lowlink[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(succ[w])))
                    advanced = True
                    break
                if w in on_stack:
                    lowlink[v] = min(lowlink[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                lowlink[parent] = min(lowlink[parent], lowlink[v])
            if lowlink[v] == index[v]:
                comp = set()
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.add(w)
                    if w == v:
                        break
                components.append(frozenset(comp))

    components.sort(key=min)
    leaf = []
    for k, comp in enumerate(components):
        if len(comp) < 2:
            continue
        if all(j in comp for (i, j) in g.arcs if i in comp):
            leaf.append(k)
    return SccReport(sccs=components, leaf_sccs=leaf)


def predecessors(g: GraphPair, i: int) -> frozenset[int]:
    """All j with a directed path j -> ... -> i of length >= 1.

    Includes i itself exactly when i lies on a cycle.
    """
    preds: set[int] = set()
    frontier = list(g.in_neighbors(i))
    while frontier:
        v = frontier.pop()
        if v in preds:
            continue
        preds.add(v)
        frontier.extend(g.in_neighbors(v))
    return frozenset(preds)


def _ancestors_of_set(g: GraphPair, targets: set[int]) -> set[int]:
    """Vertices with a nonempty directed path into ``targets``."""
    preds: set[int] = set()
    frontier: list[int] = []
    for t in targets:
        frontier.extend(g.in_neighbors(t))
    while frontier:
        v = frontier.pop()
        if v in preds:
            continue
        preds.add(v)
        frontier.extend(g.in_neighbors(v))
    return preds


def leaf_vertices(g: GraphPair) -> frozenset[int]:
    """Vertices with no outgoing arc."""
    has_out = {i for (i, _) in g.arcs}
    return frozenset(v for v in g.vertices() if v not in has_out)


def num_out_vertices(g: GraphPair, exclude: frozenset[int] = frozenset()) -> int:
    """Number of vertices with at least one outgoing arc, minus ``exclude``."""
    return len({i for (i, _) in g.arcs} - exclude)


def grounded_set(g: GraphPair) -> frozenset[int]:
    """Vertices that are a leaf or a predecessor of some leaf."""
    leaves = set(leaf_vertices(g))
    return frozenset(leaves | _ancestors_of_set(g, leaves))


def is_grounded_digraph(g: GraphPair) -> bool:
    """True iff every vertex is grounded.

    Checked two ways: directly via grounded_set, and via the condensation
    criterion (no leaf SCC with >= 2 vertices).  The two always agree; a
    mismatch means a bug.
    """
    direct = len(grounded_set(g)) == g.n
    via_condensation = len(scc_decompose(g).leaf_sccs) == 0
    if direct != via_condensation:
        raise AssertionError(
            f"groundedness checks disagree: direct={direct} "
            f"condensation={via_condensation}")
    return direct


def m_neighbors(g: GraphPair, vs: frozenset[int] | set[int]) -> frozenset[int]:
    """Vertices outside ``vs`` joined to it by a message-graph edge."""
    out = set()
    for i, j in g.edges:
        if i in vs and j not in vs:
            out.add(j)
        elif j in vs and i not in vs:
            out.add(i)
    return frozenset(out)


def u_components(g: GraphPair, within: frozenset[int] | set[int]) -> list[frozenset[int]]:
    """Connected components of the message graph restricted to ``within``."""
    adj: dict[int, set[int]] = {v: set() for v in within}
    for i, j in g.edges:
        if i in within and j in within:
            adj[i].add(j)
            adj[j].add(i)
    comps = []
    seen: set[int] = set()
    for v in sorted(within):
        if v in seen:
            continue
        comp = {v}
        frontier = [v]
        while frontier:
            u = frontier.pop()
            for w in adj[u]:
                if w not in comp:
                    comp.add(w)
                    frontier.append(w)
        seen |= comp
        comps.append(frozenset(comp))
    comps.sort(key=min)
    return comps


def u_connected_within(g: GraphPair, vs: frozenset[int] | set[int]) -> bool:
    return len(u_components(g, vs)) <= 1


def u_connected_globally(g: GraphPair, a: int, b: int) -> bool:
    """Is there a path between a and b in the whole message graph?"""
    if a == b:
        return True
    adj: dict[int, set[int]] = {}
    for i, j in g.edges:
        adj.setdefault(i, set()).add(j)
        adj.setdefault(j, set()).add(i)
    seen = {a}
    frontier = [a]
    while frontier:
        u = frontier.pop()
        for w in adj.get(u, ()):
            if w == b:
                return True
            if w not in seen:
                seen.add(w)
                frontier.append(w)
    return False


def is_leaf_scc(g: GraphPair, scc: frozenset[int]) -> bool:
    report = scc_decompose(g)
    return any(report.sccs[k] == scc for k in report.leaf_sccs)


def check_degeneracy_witness(g: GraphPair, scc: frozenset[int],
                             witness: DegeneracyWitness) -> bool:
    """Validate a degeneracy witness against the current graphs.

    The conditions: ``part`` is a nonempty proper subset of the SCC with no
    message-graph edge to the rest of the SCC; ``cover`` lies outside the
    SCC with at most one non-leaf member; and every m-neighbor of ``part``
    is in ``cover`` or has a directed path to some vertex of ``cover``.
    """
    part, cover = witness.part, witness.cover
    if not part or not part < scc:
        return False
    rest = scc - part
    for i, j in g.edges:
        if (i in part and j in rest) or (j in part and i in rest):
            return False
    if cover & scc:
        return False
    leaves = leaf_vertices(g)
    if len(cover - leaves) > 1:
        return False
    neighbors = m_neighbors(g, part)
    if not neighbors:
        return True
    reach_cover = set(cover) | _ancestors_of_set(g, set(cover))
    return neighbors <= reach_cover


def iter_degeneracy_witnesses(g: GraphPair, scc: frozenset[int]):
    """Yield every degeneracy witness of a leaf SCC, deterministically.

    ``part`` ranges over nonempty proper unions of the components of the
    message graph restricted to the SCC (exactly the bipartitions with no
    edge across), ordered by component count then smallest members.  For
    each, the candidate cover is every leaf vertex outside the SCC plus at
    most one non-leaf vertex w; since enlarging a cover with leaves
    preserves witnesses, no witness shape is missed.
    """
    comps = u_components(g, scc)
    outside_leaves = frozenset(leaf_vertices(g) - scc)
    non_leaf_outside = sorted(set(g.vertices()) - scc - outside_leaves)

    for r in range(1, len(comps)):
        for chosen in combinations(range(len(comps)), r):
            part = frozenset().union(*(comps[c] for c in chosen))
            neighbors = m_neighbors(g, part)
            if not neighbors:
                yield DegeneracyWitness(part, outside_leaves, vacuous=True)
                continue
            candidates = [outside_leaves]
            candidates.extend(outside_leaves | {w} for w in non_leaf_outside)
            for cover in candidates:
                witness = DegeneracyWitness(part, frozenset(cover))
                if check_degeneracy_witness(g, scc, witness):
                    yield witness


def is_degenerated(g: GraphPair, scc: frozenset[int]
                   ) -> tuple[bool, DegeneracyWitness | None]:
    """Decide degeneracy of a semi leaf SCC; returns the first witness."""
    if not is_leaf_scc(g, scc):
        raise ValueError(f"{sorted(scc)} is not a leaf SCC")
    cls = classify_without_degeneracy(g, scc)
    if cls is not None:
        raise ValueError(f"SCC {sorted(scc)} is not a semi leaf SCC")
    for witness in iter_degeneracy_witnesses(g, scc):
        return True, witness
    return False, None


def classify_without_degeneracy(g: GraphPair, scc: frozenset[int]) -> LeafClass | None:
    """Message-connected/disconnected test; None means semi."""
    if u_connected_within(g, scc):
        return LeafClass.MESSAGE_CONNECTED
    members = sorted(scc)
    anchor = members[0]
    for other in members[1:]:
        if not u_connected_globally(g, anchor, other):
            return LeafClass.MESSAGE_DISCONNECTED
    # anchor reaches everyone, so all pairs are mutually reachable
    return None


def classify_leaf_scc(g: GraphPair, scc: frozenset[int]
                      ) -> tuple[LeafClass, DegeneracyWitness | None]:
    """Classify one leaf SCC of g; semi SCCs also get the degeneracy test.

    Message-connected means the message graph restricted to the SCC is
    connected; message-disconnected means some pair of SCC vertices has no
    path in the whole message graph.  The two tests deliberately use
    different graphs.
    """
    if not is_leaf_scc(g, scc):
        raise ValueError(f"{sorted(scc)} is not a leaf SCC")
    cls = classify_without_degeneracy(g, scc)
    if cls is not None:
        return cls, None
    for witness in iter_degeneracy_witnesses(g, scc):
        return LeafClass.SEMI_DEGENERATED, witness
    return LeafClass.SEMI_NON_DEGENERATED, None


def classify_all(g: GraphPair) -> SccReport:
    """SCC decomposition with every leaf SCC classified."""
    report = scc_decompose(g)
    for k in report.leaf_sccs:
        cls, witness = classify_leaf_scc(g, report.sccs[k])
        report.classes[k] = cls
        if witness is not None:
            report.witnesses[k] = witness
    return report


def to_dot(g: GraphPair, dummies: frozenset[int] = frozenset()) -> str:
    """DOT rendering: arcs black and directed, message edges red and
    undirected, leaf SCCs as clusters labeled with their class, dummy
    vertices dashed."""
    report = classify_all(g)
    lines = ["digraph index_coding {"]
    clustered: set[int] = set()
    for idx, k in enumerate(report.leaf_sccs):
        scc = report.sccs[k]
        lines.append(f"  subgraph cluster_{idx} {{")
        lines.append(f'    label="{report.classes[k].value}";')
        for v in sorted(scc):
            lines.append(f"    {v};")
        lines.append("  }")
        clustered |= scc
    for v in g.vertices():
        if v in clustered:
            continue
        if v in dummies:
            lines.append(f"  {v} [style=dashed];")
        else:
            lines.append(f"  {v};")
    for i, j in sorted(g.arcs):
        lines.append(f"  {i} -> {j};")
    for i, j in sorted(g.edges):
        lines.append(f"  {i} -> {j} [color=red, dir=none];")
    lines.append("}")
    return "\n".join(lines) + "\n"


__all__ = [
    "LeafClass", "DegeneracyWitness", "SccReport",
    "scc_decompose", "predecessors", "leaf_vertices", "num_out_vertices",
    "grounded_set", "is_grounded_digraph", "m_neighbors", "is_leaf_scc",
    "check_degeneracy_witness", "iter_degeneracy_witnesses", "is_degenerated",
    "classify_leaf_scc", "classify_all", "to_dot",
]
