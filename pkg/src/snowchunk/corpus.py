"""Column-format corpora, span/OIB conversion and train/dev splitting."""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

logger = logging.getLogger(__name__)


class CorpusFormatError(ValueError):
    """Raised on malformed corpus input; carries the 1-based line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class OibLabel(str, enum.Enum):
    O = "O"
    I = "I"
    B = "B"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class Token:
    word: str
    pos: str

    def __post_init__(self):
        if not self.word or not self.pos:
            raise ValueError("token word and pos must be non-empty")


@dataclass(frozen=True, order=True)
class PhraseSpan:
    """Inclusive word range ``[start, end]``."""

    start: int
    end: int

    def __post_init__(self):
        if not 0 <= self.start <= self.end:
            raise ValueError(f"invalid span [{self.start}, {self.end}]")

    def __len__(self) -> int:
        return self.end - self.start + 1


@dataclass(frozen=True)
class AnnotatedSentence:
    tokens: tuple[Token, ...]
    gold_spans: tuple[PhraseSpan, ...] = ()
    phrase_type: str = "NP"
    # extra trailing columns (e.g. a preserved gold chunk column)
    extra: tuple[tuple[str, ...], ...] = field(default=(), compare=False)
    # False when read without a chunk column
    annotated: bool = field(default=True, compare=False)

    def __post_init__(self):
        spans = tuple(sorted(self.gold_spans))
        object.__setattr__(self, "tokens", tuple(self.tokens))
        object.__setattr__(self, "gold_spans", spans)
        _check_spans(len(self.tokens), spans)

    def __len__(self) -> int:
        return len(self.tokens)

    @property
    def words(self) -> list[str]:
        return [t.word for t in self.tokens]

    @property
    def tags(self) -> list[str]:
        return [t.pos for t in self.tokens]

    def with_spans(self, spans: Iterable[PhraseSpan]) -> "AnnotatedSentence":
        return AnnotatedSentence(self.tokens, tuple(spans), self.phrase_type, self.extra, self.annotated)


def _check_spans(length: int, spans: Sequence[PhraseSpan]) -> None:
    """`spans` must already be sorted."""
    prev_end = -1
    for span in spans:
        if span.end >= length:
            raise ValueError(f"span [{span.start}, {span.end}] outside sentence of length {length}")
        if span.start <= prev_end:
            raise ValueError(f"overlapping spans at word {span.start}")
        prev_end = span.end


# ---------------------------------------------------------------------------
# span <-> OIB


def spans_to_oib(length: int, spans: Iterable[PhraseSpan]) -> list[OibLabel]:
    """Encode spans as O/I/B, where B marks a phrase start directly after another phrase."""
    spans = sorted(spans)
    _check_spans(length, spans)
    labels = [OibLabel.O] * length
    ends = {s.end for s in spans}
    for span in spans:
        for i in range(span.start, span.end + 1):
            labels[i] = OibLabel.I
        if span.start - 1 in ends:
            labels[span.start] = OibLabel.B
    return labels


def oib_to_spans(labels: Sequence[OibLabel | str]) -> list[PhraseSpan]:
    """Decode any O/I/B sequence into spans. Total: a B always opens a phrase."""
    spans = []
    start = None
    for i, label in enumerate(labels):
        label = OibLabel(label)
        if label is OibLabel.O:
            if start is not None:
                spans.append(PhraseSpan(start, i - 1))
                start = None
        elif label is OibLabel.B or start is None:
            if start is not None:
                spans.append(PhraseSpan(start, i - 1))
            start = i
    if start is not None:
        spans.append(PhraseSpan(start, len(labels) - 1))
    return spans


def spans_to_bio(length: int, spans: Iterable[PhraseSpan], phrase_type: str = "NP") -> list[str]:
    tags = ["O"] * length
    for span in spans:
        tags[span.start] = f"B-{phrase_type}"
        for i in range(span.start + 1, span.end + 1):
            tags[i] = f"I-{phrase_type}"
    return tags


def bio_to_spans(tags: Sequence[str], strict: bool = False, phrase_type: str | None = None,
                 line_numbers: Sequence[int] | None = None) -> tuple[list[PhraseSpan], str | None]:
    """Convert CoNLL-style BIO chunk tags to spans.

    When `phrase_type` is given, chunks of other types are read as O.
    Returns the spans and the phrase type seen (None when there were no chunks).
    """
    spans = []
    start = None
    open_type = None
    seen_type = phrase_type
    for i, tag in enumerate(tags):
        lineno = line_numbers[i] if line_numbers else None
        if tag == "O":
            prefix, kind = "O", None
        else:
            prefix, sep, kind = tag.partition("-")
            if not sep or prefix not in ("B", "I") or not kind:
                raise CorpusFormatError(f"bad chunk tag {tag!r}", lineno)
            if phrase_type is not None and kind != phrase_type:
                prefix, kind = "O", None
        if prefix == "I" and start is not None and kind == open_type:
            continue
        if start is not None:
            spans.append(PhraseSpan(start, i - 1))
            start = None
        if prefix == "O":
            continue
        if prefix == "I":
            if strict:
                raise CorpusFormatError(f"{tag} does not continue an open {kind} chunk", lineno)
            logger.warning("line %s: %s with no open chunk; starting a new one", lineno, tag)
        if seen_type is None:
            seen_type = kind
        elif kind != seen_type:
            logger.warning("line %s: mixed chunk types %s and %s", lineno, seen_type, kind)
        start, open_type = i, kind
    if start is not None:
        spans.append(PhraseSpan(start, len(tags) - 1))
    return spans, seen_type


# ---------------------------------------------------------------------------
# corpus files


def parse_corpus(stream: str | Iterable[str], *, strict: bool = False, columns: int = 3,
                 chunk_column: int = 2, phrase_type: str | None = None) -> list[AnnotatedSentence]:
    """Read ``word<TAB>pos<TAB>chunk`` lines into sentences.

    Blank lines separate sentences, ``#`` lines are skipped. Lines without a TAB
    fall back to whitespace splitting. With ``columns=None`` any count >= 2 is
    accepted; sentences lacking the chunk column come back unannotated.
    """
    if isinstance(stream, str):
        stream = stream.splitlines()
    sentences = []
    rows: list[list[str]] = []
    linenos: list[int] = []

    def flush():
        if not rows:
            return
        tokens = [Token(r[0], r[1]) for r in rows]
        annotated = all(len(r) > chunk_column for r in rows)
        if not annotated and any(len(r) > chunk_column for r in rows):
            raise CorpusFormatError("chunk column present on some lines only", linenos[0])
        chunks = [r[chunk_column] for r in rows] if annotated else ["O"] * len(rows)
        spans, kind = bio_to_spans(chunks, strict, phrase_type, linenos)
        extra = tuple(tuple(r[chunk_column + 1:]) for r in rows)
        if not any(extra):
            extra = ()
        sentences.append(AnnotatedSentence(tuple(tokens), tuple(spans), kind or phrase_type or "NP",
                                           extra, annotated))
        rows.clear()
        linenos.clear()

    for lineno, line in enumerate(stream, 1):
        line = line.rstrip("\r\n")
        if not line.strip():
            flush()
            continue
        if line.startswith("#"):
            continue
        cols = line.split("\t") if "\t" in line else line.split()
        if (len(cols) != columns if columns is not None else len(cols) < 2) or not all(cols):
            raise CorpusFormatError(f"expected {columns or '>=2'} columns, got {len(cols)}", lineno)
        rows.append(cols)
        linenos.append(lineno)
    flush()
    return sentences


def read_corpus(path, **kwargs) -> list[AnnotatedSentence]:
    with open(path, encoding="utf-8") as f:
        return parse_corpus(f, **kwargs)


def format_sentence(sentence: AnnotatedSentence, spans: Iterable[PhraseSpan] | None = None) -> str:
    """Serialize one sentence; `spans` overrides the gold chunk column."""
    spans = sentence.gold_spans if spans is None else sorted(spans)
    bio = spans_to_bio(len(sentence), spans, sentence.phrase_type)
    lines = []
    for i, (tok, chunk) in enumerate(zip(sentence.tokens, bio)):
        cols = [tok.word, tok.pos, chunk]
        if sentence.extra:
            cols.extend(sentence.extra[i])
        lines.append("\t".join(cols) + "\n")
    return "".join(lines)


def format_corpus(sentences: Iterable[AnnotatedSentence]) -> str:
    return "".join(format_sentence(s) + "\n" for s in sentences)


def split_train_dev(corpus: Sequence[AnnotatedSentence], dev_fraction: float = 0.1):
    """Tail split: the last ceil(n * dev_fraction) sentences become dev."""
    if not 0 < dev_fraction < 1:
        raise ValueError("dev_fraction must be in (0, 1)")
    if not corpus:
        raise ValueError("cannot split an empty corpus")
    # tolerance guards against products like 30 * 0.1 = 3.0000000000000004
    n_dev = math.ceil(len(corpus) * dev_fraction - 1e-9)
    return list(corpus[: len(corpus) - n_dev]), list(corpus[len(corpus) - n_dev:])
