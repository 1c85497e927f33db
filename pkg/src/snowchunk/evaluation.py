"""Chunk precision/recall/F, word-level accuracies and length breakdowns."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

from .corpus import OibLabel, PhraseSpan


@dataclass(frozen=True)
class Metrics:
    correct: int = 0
    gold_total: int = 0
    proposed_total: int = 0
    beta: float = 1.0

    def __add__(self, other: "Metrics") -> "Metrics":
        return Metrics(self.correct + other.correct, self.gold_total + other.gold_total,
                       self.proposed_total + other.proposed_total, self.beta)

    @property
    def recall(self) -> float:
        return self.correct / self.gold_total if self.gold_total else 0.0

    @property
    def precision(self) -> float:
        return self.correct / self.proposed_total if self.proposed_total else 0.0

    @property
    def f_beta(self) -> float:
        return f_beta(self.recall, self.precision, self.beta)

    @property
    def counts(self) -> tuple[int, int, int]:
        return self.correct, self.gold_total, self.proposed_total


def f_beta(recall: float, precision: float, beta: float = 1.0) -> float:
    """(b^2 + 1) R P / (b^2 P + R), and 0 when R P is 0."""
    if beta <= 0:
        raise ValueError("beta must be positive")
    num = (beta * beta + 1) * recall * precision
    if num == 0:
        return 0.0
    return num / (beta * beta * precision + recall)


def pct(ratio: float) -> str:
    """Percentage with one decimal, as in result tables."""
    return f"{100 * ratio:.1f}"


def _as_set(spans: Iterable) -> set[tuple[int, int]]:
    out = set()
    for s in spans:
        out.add((s.start, s.end) if isinstance(s, PhraseSpan) else tuple(s))
    return out


def chunk_metrics(gold: Iterable, proposed: Iterable, beta: float = 1.0) -> Metrics:
    gold, proposed = _as_set(gold), _as_set(proposed)
    return Metrics(len(gold & proposed), len(gold), len(proposed), beta)


def corpus_metrics(gold: Sequence[Iterable], proposed: Sequence[Iterable], beta: float = 1.0) -> Metrics:
    if len(gold) != len(proposed):
        raise ValueError(f"{len(gold)} gold sentences but {len(proposed)} proposed")
    total = Metrics(beta=beta)
    for g, p in zip(gold, proposed):
        total = total + chunk_metrics(g, p, beta)
    return total


def oib_accuracy(gold: Sequence[OibLabel | str], predicted: Sequence[OibLabel | str]) -> float:
    if len(gold) != len(predicted):
        raise ValueError(f"length mismatch: {len(gold)} gold vs {len(predicted)} predicted labels")
    if not gold:
        raise ValueError("accuracy of an empty sequence is undefined")
    return sum(str(g) == str(p) for g, p in zip(gold, predicted)) / len(gold)


@dataclass(frozen=True)
class BracketAccuracy:
    matches: int = 0
    words: int = 0
    positive_matches: int = 0
    positives: int = 0

    def __add__(self, other: "BracketAccuracy") -> "BracketAccuracy":
        return BracketAccuracy(self.matches + other.matches, self.words + other.words,
                               self.positive_matches + other.positive_matches,
                               self.positives + other.positives)

    @property
    def overall(self) -> float:
        return self.matches / self.words if self.words else 0.0

    @property
    def positive_only(self) -> float:
        return self.positive_matches / self.positives if self.positives else 0.0


def bracket_flags(spans: Iterable, kind: str, length: int) -> list[bool]:
    if kind not in ("open", "close"):
        raise ValueError(f"kind must be 'open' or 'close', not {kind!r}")
    flags = [False] * length
    for start, end in _as_set(spans):
        flags[start if kind == "open" else end] = True
    return flags


def bracket_accuracy(gold_spans: Iterable, predicted_spans: Iterable, kind: str,
                     length: int) -> BracketAccuracy:
    """Per-word agreement on "starts a phrase" (open) or "ends a phrase" (close)."""
    gold = bracket_flags(gold_spans, kind, length)
    pred = bracket_flags(predicted_spans, kind, length)
    return binary_accuracy(gold, pred)


def binary_accuracy(gold: Sequence[bool], predicted: Sequence[bool]) -> BracketAccuracy:
    if len(gold) != len(predicted):
        raise ValueError("length mismatch")
    matches = sum(g == p for g, p in zip(gold, predicted))
    pos = sum(gold)
    pos_matches = sum(1 for g, p in zip(gold, predicted) if g and p)
    return BracketAccuracy(matches, len(gold), pos_matches, pos)


@dataclass(frozen=True)
class LengthBucket:
    label: str
    contains: Callable[[int], bool]


DEFAULT_BUCKETS = (
    LengthBucket("<=4", lambda n: n <= 4),
    LengthBucket("4<l<=8", lambda n: 4 < n <= 8),
    LengthBucket(">8", lambda n: n > 8),
)


def _bucket_of(length: int, buckets: Sequence[LengthBucket]) -> int:
    hits = [i for i, b in enumerate(buckets) if b.contains(length)]
    if len(hits) != 1:
        raise ValueError(f"length {length} falls in {len(hits)} buckets; buckets must partition lengths")
    return hits[0]


def length_breakdown(gold: Sequence[Iterable], proposed: Sequence[Iterable],
                     buckets: Sequence[LengthBucket] = DEFAULT_BUCKETS,
                     beta: float = 1.0) -> list[tuple[LengthBucket, Metrics]]:
    """Per-bucket metrics; gold and proposed spans are each bucketed by their own length.

    Takes per-sentence span collections (one entry per sentence).
    """
    if len(gold) != len(proposed):
        raise ValueError(f"{len(gold)} gold sentences but {len(proposed)} proposed")
    correct = [0] * len(buckets)
    n_gold = [0] * len(buckets)
    n_prop = [0] * len(buckets)
    for g, p in zip(gold, proposed):
        g, p = _as_set(g), _as_set(p)
        for s, e in g:
            n_gold[_bucket_of(e - s + 1, buckets)] += 1
        for s, e in p:
            b = _bucket_of(e - s + 1, buckets)
            n_prop[b] += 1
            if (s, e) in g:
                correct[b] += 1
    return [(b, Metrics(correct[i], n_gold[i], n_prop[i], beta)) for i, b in enumerate(buckets)]


# -- reports ---------------------------------------------------------------


def metric_lines(prefix: str, m: Metrics) -> list[str]:
    return [
        f"metric={prefix}recall value={m.recall:.6f}",
        f"metric={prefix}precision value={m.precision:.6f}",
        f"metric={prefix}f{m.beta:g} value={m.f_beta:.6f}",
    ]


def format_table(rows: Sequence[tuple[str, Metrics]], extra_header: Sequence[str] = (),
                 extra: Sequence[Sequence[str]] = ()) -> str:
    header = ["", "Patterns", "Recall", "Precision", "F"] + list(extra_header)
    body = []
    for i, (name, m) in enumerate(rows):
        cells = [name, str(m.gold_total), pct(m.recall), pct(m.precision), pct(m.f_beta)]
        if extra:
            cells += list(extra[i])
        body.append(cells)
    widths = [max(len(r[c]) for r in [header] + body) for c in range(len(header))]
    lines = []
    for r in [header] + body:
        lines.append("  ".join(cell.ljust(w) if c == 0 else cell.rjust(w)
                               for c, (cell, w) in enumerate(zip(r, widths))).rstrip())
    return "\n".join(lines) + "\n"
