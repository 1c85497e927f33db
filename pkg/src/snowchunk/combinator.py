"""Choosing a maximum-value set of compatible bracket pairs.

Bracket positions live on the gaps between words: an open bracket before word
``i`` sits at ``i`` and a close bracket after word ``i`` sits at ``i + 1``. With
nodes ``0..n`` for those gaps, a zero-weight edge ``j -> j+1`` for every gap and
an edge ``pos(o) -> pos(c)`` of weight ``v(p)`` for every pair, the best pairing
is the heaviest path from ``0`` to ``n``. Edges only point rightwards, so one
left-to-right sweep finds it in O(n + pairs).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Sequence


class Kind(str, enum.Enum):
    OPEN = "open"
    CLOSE = "close"


@dataclass(frozen=True)
class BracketCandidate:
    kind: Kind
    word_index: int
    gamma: float
    origin: "BracketCandidate | None" = None

    def __post_init__(self):
        if self.kind is Kind.CLOSE:
            if self.origin is None or self.origin.kind is not Kind.OPEN:
                raise ValueError("a close candidate needs an open origin")
            if self.origin.word_index > self.word_index:
                raise ValueError("close candidate precedes its open origin")

    @property
    def position(self) -> int:
        return bracket_position(self)


def open_bracket(index: int, gamma: float) -> BracketCandidate:
    return BracketCandidate(Kind.OPEN, index, gamma)


def close_bracket(index: int, gamma: float, origin: BracketCandidate) -> BracketCandidate:
    return BracketCandidate(Kind.CLOSE, index, gamma, origin)


def bracket_position(candidate: BracketCandidate) -> int:
    if candidate.kind is Kind.OPEN:
        return candidate.word_index
    return candidate.word_index + 1


@dataclass(frozen=True)
class Pair:
    o: BracketCandidate
    c: BracketCandidate

    @property
    def value(self) -> float:
        return self.o.gamma * self.c.gamma

    @property
    def span(self) -> tuple[int, int]:
        return self.o.word_index, self.c.word_index

    def before(self, other: "Pair") -> bool:
        return bracket_position(self.c) <= bracket_position(other.o)


def compatible(p1: Pair, p2: Pair) -> bool:
    return p1.before(p2) or p2.before(p1)


@dataclass(frozen=True)
class Pairing:
    pairs: tuple[Pair, ...]

    @property
    def total(self) -> float:
        total = 0.0
        for p in self.pairs:
            total += p.value
        return total

    @property
    def spans(self) -> list[tuple[int, int]]:
        return [p.span for p in self.pairs]


def make_pairs(opens: Iterable[BracketCandidate], closes: Iterable[BracketCandidate],
               n: int) -> list[Pair]:
    """Pair every close with the open it was predicted for, checking positions lie in [0, n]."""
    opens = list(opens)
    known = set(opens)
    for o in opens:
        if o.kind is not Kind.OPEN:
            raise ValueError("open list holds a close candidate")
        if not 0 <= bracket_position(o) <= n:
            raise ValueError(f"open candidate at {o.word_index} outside sentence of length {n}")
    pairs = []
    for c in closes:
        if c.kind is not Kind.CLOSE:
            raise ValueError("close list holds an open candidate")
        if c.origin not in known:
            raise ValueError(f"close candidate at {c.word_index} has no matching open candidate")
        if not 0 <= bracket_position(c) <= n:
            raise ValueError(f"close candidate at {c.word_index} outside sentence of length {n}")
        pairs.append(Pair(c.origin, c))
    return pairs


def best_pairing(opens: Iterable[BracketCandidate], closes: Iterable[BracketCandidate],
                 n: int) -> Pairing:
    """Heaviest path through the bracket DAG.

    Comparisons use >= for pair edges, scanned in (open position, close position)
    order: on equal totals a pair edge beats the skip edge and a later-opening
    pair beats an earlier one, so finer segmentations win ties.
    """
    pairs = make_pairs(opens, closes, n)
    # two bucket passes order each node's incoming edges by open position
    by_open: list[list[Pair]] = [[] for _ in range(n + 1)]
    for p in pairs:
        by_open[p.o.word_index].append(p)
    incoming: list[list[Pair]] = [[] for _ in range(n + 1)]
    for bucket in by_open:
        for p in bucket:
            incoming[p.c.word_index + 1].append(p)

    best = [0.0] * (n + 1)
    via: list[Pair | None] = [None] * (n + 1)
    for node in range(1, n + 1):
        score, choice = best[node - 1], None
        for p in incoming[node]:
            cand = best[p.o.word_index] + p.o.gamma * p.c.gamma
            if cand >= score:
                score, choice = cand, p
        best[node], via[node] = score, choice

    chosen = []
    node = n
    while node > 0:
        p = via[node]
        if p is None:
            node -= 1
        else:
            chosen.append(p)
            node = bracket_position(p.o)
    chosen.reverse()
    return Pairing(tuple(chosen))


MAX_ORACLE_PAIRS = 20


def brute_force_pairing(opens: Iterable[BracketCandidate], closes: Iterable[BracketCandidate],
                        n: int) -> Pairing:
    """Exhaustive search over every subset of pairs; for testing only."""
    pairs = sorted(make_pairs(opens, closes, n),
                   key=lambda p: (bracket_position(p.o), bracket_position(p.c)))
    if len(pairs) > MAX_ORACLE_PAIRS:
        raise ValueError(f"brute force limited to {MAX_ORACLE_PAIRS} pairs, got {len(pairs)}")
    conflicts = [0] * len(pairs)
    for i, a in enumerate(pairs):
        for j, b in enumerate(pairs):
            if i != j and not compatible(a, b):
                conflicts[i] |= 1 << j

    best_total, best_subset = 0.0, ()
    chosen: list[Pair] = []

    def visit(i: int, mask: int) -> None:
        nonlocal best_total, best_subset
        if i == len(pairs):
            total = Pairing(tuple(chosen)).total
            if total > best_total:
                best_total, best_subset = total, tuple(chosen)
            return
        visit(i + 1, mask)
        if not conflicts[i] & mask:
            chosen.append(pairs[i])
            visit(i + 1, mask | 1 << i)
            chosen.pop()

    visit(0, 0)
    return Pairing(best_subset)


def dump_pairing(opens: Sequence[BracketCandidate], closes: Sequence[BracketCandidate],
                 n: int, pairing: Pairing | None = None) -> str:
    """One ``o=<i> c=<j> v=<value>`` line per candidate pair, then ``chosen: ...``."""
    pairs = sorted(make_pairs(opens, closes, n), key=lambda p: p.span)
    if pairing is None:
        pairing = best_pairing(opens, closes, n)
    lines = [f"o={p.o.word_index} c={p.c.word_index} v={p.value!r}" for p in pairs]
    chosen = " ".join(f"[{o},{c}]" for o, c in pairing.spans)
    lines.append(f"chosen: {chosen} total={pairing.total!r}")
    return "\n".join(lines) + "\n"
