"""Decodability certification and the brute-force minimum-codelength oracle.

GF(2) vectors are packed into ints: bit (i-1) stands for message i.
The oracle is exact for linear codes only; nonlinear codes can in
principle do better in other index-coding settings, so its result is an
upper bound on the true optimum that becomes a certificate exactly when
it meets the structural lower bound.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from itertools import combinations

from . import graphs
from .code import CodeRow, LinearIndexCode, mask_of
from .model import ProblemInstance, build_graphs, simplify

EXHAUSTIVE_LIMIT = 20
ORACLE_LIMIT = 8


class GuardError(ValueError):
    """An instance exceeds a hard size guard."""


@dataclass(frozen=True)
class CertEntry:
    receiver: int
    wanted: int
    row_indices: tuple[int, ...]
    uses_prior: bool


@dataclass(frozen=True)
class DecodeCertificate:
    entries: tuple[CertEntry, ...]

    def entry(self, receiver: int, wanted: int) -> CertEntry:
        for e in self.entries:
            if e.receiver == receiver and e.wanted == wanted:
                return e
        raise KeyError((receiver, wanted))


@dataclass(frozen=True)
class DecodeFailure:
    receiver: int
    wanted: int


class _Gf2Solver:
    """Incremental GF(2) basis that remembers how each pivot was formed.

    Vectors are inserted in a fixed order; pivots are the lowest set bit.
    Combos are bitmasks over the insertion order, so extracted solutions
    are reproducible.
    """

    def __init__(self):
        self.pivots: dict[int, tuple[int, int]] = {}  # pivot bit -> (vec, combo)
        self.count = 0

    def add(self, vec: int) -> None:
        combo = 1 << self.count
        self.count += 1
        vec, combo = self._reduce(vec, combo)
        if vec:
            self.pivots[vec & -vec] = (vec, combo)

    def _reduce(self, vec: int, combo: int) -> tuple[int, int]:
        while vec:
            low = vec & -vec
            hit = self.pivots.get(low)
            if hit is None:
                return vec, combo
            vec ^= hit[0]
            combo ^= hit[1]
        return vec, combo

    def solve(self, target: int) -> int | None:
        """Combo expressing target in the span, or None."""
        vec, combo = self._reduce(target, 0)
        return None if vec else combo


def _validate_supports(code: LinearIndexCode, inst: ProblemInstance) -> None:
    for k, row in enumerate(code.rows):
        if not (1 <= row.sender <= inst.num_senders):
            raise ValueError(f"row {k}: unknown sender {row.sender}")
        if not row.support() <= inst.senders[row.sender - 1]:
            raise ValueError(
                f"row {k}: support {sorted(row.support())} not owned by "
                f"sender {row.sender}")


def rank_decodable(code: LinearIndexCode, inst: ProblemInstance
                   ) -> DecodeCertificate | DecodeFailure:
    """Check that every receiver can reconstruct its wanted messages.

    Receiver r may combine the code rows with its prior e_r (when its own
    message exists); success means each wanted unit vector lies in that
    span.  Returns certificates, or the first failing (receiver, wanted)
    pair in index order.
    """
    _validate_supports(code, inst)
    carried = inst.carried
    entries = []
    for r in range(1, inst.num_messages + 1):
        wants = sorted(inst.wants[r - 1])
        if not wants:
            continue
        solver = _Gf2Solver()
        for row in code.rows:
            solver.add(row.coeffs)
        prior_slot = None
        if r in carried:
            prior_slot = solver.count
            solver.add(mask_of((r,)))
        for j in wants:
            combo = solver.solve(mask_of((j,)))
            if combo is None:
                return DecodeFailure(receiver=r, wanted=j)
            rows_used = tuple(k for k in range(len(code.rows))
                              if (combo >> k) & 1)
            uses_prior = prior_slot is not None and bool((combo >> prior_slot) & 1)
            entries.append(CertEntry(r, j, rows_used, uses_prior))
    return DecodeCertificate(tuple(entries))


def verify_exhaustive(code: LinearIndexCode, inst: ProblemInstance) -> bool:
    """Independent decodability check by simulating every message vector.

    For each receiver, assignments are grouped by what the receiver
    observes (all codewords plus its own bit); the code works iff the
    receiver's wanted bits are constant on every group.
    """
    if inst.num_messages > EXHAUSTIVE_LIMIT:
        raise GuardError(
            f"m={inst.num_messages} exceeds exhaustive limit {EXHAUSTIVE_LIMIT}")
    _validate_supports(code, inst)
    carried_set = inst.carried
    carried = sorted(carried_set)
    receivers = [r for r in range(1, inst.num_messages + 1) if inst.wants[r - 1]]
    want_masks = {r: mask_of(inst.wants[r - 1]) for r in receivers}
    seen: dict[int, dict[tuple, int]] = {r: {} for r in receivers}

    for bits in range(1 << len(carried)):
        x = 0
        for pos, msg in enumerate(carried):
            if (bits >> pos) & 1:
                x |= 1 << (msg - 1)
        codeword = tuple((row.coeffs & x).bit_count() & 1 for row in code.rows)
        for r in receivers:
            own = (x >> (r - 1)) & 1 if r in carried_set else None
            obs = (codeword, own)
            wanted_bits = x & want_masks[r]
            prev = seen[r].setdefault(obs, wanted_bits)
            if prev != wanted_bits:
                return False
    return True


def _candidate_rows(inst: ProblemInstance) -> list[CodeRow]:
    """Every nonzero sender-feasible row, deduplicated with smallest-sender
    attribution, sorted by coefficient mask."""
    best_sender: dict[int, int] = {}
    for s, ms in enumerate(inst.senders, start=1):
        owned = sorted(ms)
        for r in range(1, len(owned) + 1):
            for combo in combinations(owned, r):
                best_sender.setdefault(mask_of(combo), s)
    return [CodeRow(best_sender[mask], mask)
            for mask in sorted(best_sender)]


def _requirements(inst: ProblemInstance) -> list[tuple[int | None, list[int]]]:
    """Per receiver with nonempty wants: (prior mask or None, wanted masks)."""
    carried = inst.carried
    reqs = []
    for r in range(1, inst.num_messages + 1):
        wants = sorted(inst.wants[r - 1])
        if not wants:
            continue
        prior = mask_of((r,)) if r in carried else None
        reqs.append((prior, [mask_of((j,)) for j in wants]))
    return reqs


def _span_decodes(span: frozenset[int],
                  reqs: list[tuple[int | None, list[int]]]) -> bool:
    for prior, wanted in reqs:
        for target in wanted:
            if target in span:
                continue
            if prior is None or (target ^ prior) not in span:
                return False
    return True


def _search_at_length(masks: list[int], length: int,
                      reqs: list[tuple[int | None, list[int]]],
                      first_index: int | None = None) -> tuple[int, ...] | None:
    """First (lexicographically by index) length-subset that decodes.

    Decodability depends only on the span of the chosen rows, and when
    lengths are scanned in increasing order any minimal decodable subset
    is linearly independent, so the search may skip dependent extensions
    and prune spans whose completions already failed at this length
    without changing which subset is found first.
    """
    if length == 0:
        return () if _span_decodes(frozenset((0,)), reqs) else None
    failed: set[frozenset[int]] = set()

    def dfs(start: int, chosen: tuple[int, ...],
            span: frozenset[int]) -> tuple[int, ...] | None:
        remaining = length - len(chosen)
        if remaining == 0:
            return chosen if _span_decodes(span, reqs) else None
        for idx in range(start, len(masks) - remaining + 1):
            x = masks[idx]
            if x in span:
                continue
            grown = span | {v ^ x for v in span}
            if grown in failed:
                continue
            hit = dfs(idx + 1, chosen + (idx,), grown)
            if hit is not None:
                return hit
            failed.add(grown)
        return None

    base = frozenset((0,))
    if first_index is not None:
        x = masks[first_index]
        return dfs(first_index + 1, (first_index,),
                   base | {v ^ x for v in base})
    return dfs(0, (), base)


def oracle_min_linear(inst: ProblemInstance, max_len: int | None = None,
                      limit: int = ORACLE_LIMIT, jobs: int = 1
                      ) -> tuple[int, LinearIndexCode] | None:
    """Minimum-length linear code by exhaustive subset search.

    Candidate rows are all distinct nonzero sender-feasible vectors;
    duplicate rows can never help a span, so codes are searched as sets,
    shortest first, returning the lexicographically smallest witness.
    Returns None when ``max_len`` is exhausted without success.
    """
    if inst.num_messages > limit:
        raise GuardError(f"m={inst.num_messages} exceeds oracle limit {limit}")
    candidates = _candidate_rows(inst)
    masks = [row.coeffs for row in candidates]
    reqs = _requirements(inst)
    cap = len(inst.carried) if max_len is None else max_len
    cap = min(cap, len(masks))

    for length in range(cap + 1):
        if jobs > 1 and length >= 1:
            with ProcessPoolExecutor(max_workers=jobs) as pool:
                futures = [pool.submit(_search_at_length, masks, length, reqs, f)
                           for f in range(len(masks) - length + 1)]
                hit = None
                for fut in futures:
                    found = fut.result()
                    if found is not None and (hit is None or found < hit):
                        hit = found
        else:
            hit = _search_at_length(masks, length, reqs)
        if hit is not None:
            rows = tuple(candidates[k] for k in hit)
            return length, LinearIndexCode(inst.num_messages, rows)
    return None


@dataclass(frozen=True)
class ClosureViolation:
    rule: str
    receiver: int | None
    message: int


@dataclass(frozen=True)
class ClosureReport:
    violations: tuple[ClosureViolation, ...]

    @property
    def ok(self) -> bool:
        return not self.violations


def check_decode_closure(code: LinearIndexCode, inst: ProblemInstance) -> ClosureReport:
    """Structural facts every valid code must satisfy, checked as rank facts.

    predecessor: each receiver can decode every predecessor's message.
    leaf-predecessor: predecessors of leaf vertices decode from the rows
    alone.  disconnected-scc: messages of message-disconnected leaf SCCs
    decode from the rows alone.
    """
    simple, _ = simplify(inst)
    g = build_graphs(simple)
    violations = []

    base = _Gf2Solver()
    for row in code.rows:
        base.add(row.coeffs)

    report = graphs.classify_all(g)
    plain_targets: set[tuple[str, int]] = set()
    for v in sorted(graphs.leaf_vertices(g)):
        for j in sorted(graphs.predecessors(g, v)):
            plain_targets.add(("leaf-predecessor", j))
    for k in report.leaf_sccs:
        if report.classes[k] is graphs.LeafClass.MESSAGE_DISCONNECTED:
            for j in sorted(report.sccs[k]):
                plain_targets.add(("disconnected-scc", j))
    for rule, j in sorted(plain_targets):
        if base.solve(mask_of((j,))) is None:
            violations.append(ClosureViolation(rule, None, j))

    carried = simple.carried
    for r in range(1, g.n + 1):
        preds = graphs.predecessors(g, r)
        if not preds:
            continue
        solver = _Gf2Solver()
        for row in code.rows:
            solver.add(row.coeffs)
        if r in carried:
            solver.add(mask_of((r,)))
        for j in sorted(preds):
            if j not in carried:
                continue
            if solver.solve(mask_of((j,))) is None:
                violations.append(ClosureViolation("predecessor", r, j))
    return ClosureReport(tuple(violations))


__all__ = [
    "GuardError", "CertEntry", "DecodeCertificate", "DecodeFailure",
    "rank_decodable", "verify_exhaustive", "oracle_min_linear",
    "ClosureViolation", "ClosureReport", "check_decode_closure",
    "EXHAUSTIVE_LIMIT", "ORACLE_LIMIT",
]
