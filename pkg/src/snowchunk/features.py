"""Positional conjunction features.

Every feature is an interned string ``<channel>|<offset>:<symbol>|...`` whose
offsets form a contiguous run relative to the designated word. Positions outside
the sentence read as the sentinels ``<S>`` (before) and ``<E>`` (after).
"""

from __future__ import annotations

import sys
from dataclasses import dataclass
from typing import Sequence

from .corpus import AnnotatedSentence, OibLabel

START = "<S>"
END = "<E>"

TAG = "t"
WORD = "w"
OIB = "oib"
OPEN = "open"

DISTANCE_BUCKETS = ((0, "0"), (1, "1"), (2, "2"), (3, "3"), (7, "4-7"), (15, "8-15"))


@dataclass(frozen=True)
class FeatureTemplate:
    """All contiguous conjunctions of size 1..k inside offsets -w..+w."""

    w: int
    k: int

    def __post_init__(self):
        if self.w < 0 or not 1 <= self.k <= 2 * self.w + 1:
            raise ValueError(f"invalid template w={self.w} k={self.k}")

    def count(self) -> int:
        return sum(2 * self.w + 2 - j for j in range(1, self.k + 1))


DEFAULT_TAGS = FeatureTemplate(3, 4)
DEFAULT_WORDS = FeatureTemplate(1, 2)


def _escape(symbol: str) -> str:
    if "%" in symbol or "|" in symbol:
        symbol = symbol.replace("%", "%25").replace("|", "%7C")
    return symbol


def _unescape(symbol: str) -> str:
    return symbol.replace("%7C", "|").replace("%25", "%")


def encode(channel: str, items: Sequence[tuple[int | str, str]]) -> str:
    parts = [channel]
    parts.extend(f"{off}:{_escape(sym)}" for off, sym in items)
    return sys.intern("|".join(parts))


def decode(feature: str) -> tuple[str, list[tuple[int | str, str]]]:
    channel, *parts = feature.split("|")
    items = []
    for part in parts:
        key, _, sym = part.partition(":")
        try:
            key = int(key)
        except ValueError:
            pass
        items.append((key, _unescape(sym)))
    return channel, items


def render(feature: str) -> str:
    """Human-readable form: ``()`` is the designated position, ``_`` a skipped one.

    ``t|-3:DT`` renders as ``DT _ _ ()`` and ``t|0:WRB|1:TO`` as ``(WRB) TO``.
    """
    _, items = decode(feature)
    symbols = dict(items)
    lo, hi = min(min(symbols), 0), max(max(symbols), 0)
    out = []
    for off in range(lo, hi + 1):
        if off == 0:
            out.append(f"({symbols[0]})" if 0 in symbols else "()")
        else:
            out.append(symbols.get(off, "_"))
    return " ".join(out)


def _padded(symbols: Sequence[str], w: int) -> list[str]:
    return [START] * w + list(symbols) + [END] * w


def _window_conjunctions(channel: str, padded: Sequence[str], index: int, tpl: FeatureTemplate,
                         skip_zero: bool = False) -> list[str]:
    # padded has tpl.w sentinels on each side: word i sits at padded[i + w]
    w = tpl.w
    out = []
    for size in range(1, tpl.k + 1):
        for first in range(-w, w - size + 2):
            offsets = range(first, first + size)
            if skip_zero and first <= 0 < first + size:
                continue
            out.append(encode(channel, [(o, padded[index + w + o]) for o in offsets]))
    return out


def extract_base(sentence: AnnotatedSentence | Sequence, index: int,
                 tag_tpl: FeatureTemplate | None = DEFAULT_TAGS,
                 word_tpl: FeatureTemplate | None = DEFAULT_WORDS) -> frozenset[str]:
    tags, words = _tags_words(sentence)
    if not 0 <= index < len(tags):
        raise IndexError(f"word index {index} outside sentence of length {len(tags)}")
    feats = []
    if tag_tpl is not None:
        feats += _window_conjunctions(TAG, _padded(tags, tag_tpl.w), index, tag_tpl)
    if word_tpl is not None:
        feats += _window_conjunctions(WORD, _padded(words, word_tpl.w), index, word_tpl)
    return frozenset(feats)


def sentence_base_features(sentence, tag_tpl: FeatureTemplate | None = DEFAULT_TAGS,
                           word_tpl: FeatureTemplate | None = DEFAULT_WORDS) -> list[frozenset[str]]:
    """extract_base for every word, padding each channel once."""
    tags, words = _tags_words(sentence)
    ptags = _padded(tags, tag_tpl.w) if tag_tpl is not None else None
    pwords = _padded(words, word_tpl.w) if word_tpl is not None else None
    out = []
    for i in range(len(tags)):
        feats = []
        if ptags is not None:
            feats += _window_conjunctions(TAG, ptags, i, tag_tpl)
        if pwords is not None:
            feats += _window_conjunctions(WORD, pwords, i, word_tpl)
        out.append(frozenset(feats))
    return out


def extract_oib_context(labels: Sequence[OibLabel | str], words: Sequence[str], index: int, w: int,
                        bigrams: str = "oib") -> frozenset[str]:
    """Neighbouring O/I/B statuses (never the designated word's own) and size-2 conjunctions.

    ``bigrams="oib"`` conjoins adjacent statuses; ``bigrams="words"`` conjoins
    adjacent surrounding words instead.
    """
    if len(labels) != len(words):
        raise ValueError("labels and words must be aligned")
    if w == 0:
        return frozenset()
    if not 0 <= index < len(labels):
        raise IndexError(f"word index {index} outside sentence of length {len(labels)}")
    statuses = _padded([str(label) for label in labels], w)
    feats = [encode(OIB, [(o, statuses[index + w + o])]) for o in range(-w, w + 1) if o != 0]
    if bigrams == "oib":
        source, channel = statuses, OIB
    elif bigrams == "words":
        source, channel = _padded(words, w), WORD + "2"
    else:
        raise ValueError(f"unknown bigram mode {bigrams!r}")
    for first in range(-w, w):
        if first == 0 or first == -1:
            continue
        feats.append(encode(channel, [(first, source[index + w + first]),
                                      (first + 1, source[index + w + first + 1])]))
    return frozenset(feats)


def distance_bucket(distance: int) -> str:
    for upper, name in DISTANCE_BUCKETS:
        if distance <= upper:
            return name
    return "16+"


def extract_close_link(sentence, index: int, open_index: int) -> frozenset[str]:
    """Features tying a close-bracket decision at `index` to an open bracket at `open_index`."""
    if open_index > index:
        raise ValueError(f"open bracket {open_index} lies after close position {index}")
    tags, _ = _tags_words(sentence)
    nxt = tags[open_index + 1] if open_index + 1 < len(tags) else END
    return frozenset([
        encode(OPEN, [("dist", distance_bucket(index - open_index))]),
        encode(OPEN, [(0, tags[open_index])]),
        encode(OPEN, [(0, tags[open_index]), (1, nxt)]),
    ])


def _tags_words(sentence):
    if isinstance(sentence, AnnotatedSentence):
        return sentence.tags, sentence.words
    tokens = list(sentence)
    return [t.pos for t in tokens], [t.word for t in tokens]
