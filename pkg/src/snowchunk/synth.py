"""Seeded synthetic corpora whose phrases follow a known tag pattern."""

from __future__ import annotations

import random

from .corpus import AnnotatedSentence, PhraseSpan, Token

DEFAULT_PATTERN = "DT JJ* NN"
MAX_REPEAT = 3

VOCAB = {
    "DT": ["the", "a", "this", "that", "every", "some"],
    "JJ": ["big", "red", "old", "new", "small", "quick", "happy", "dark", "green", "long"],
    "NN": ["dog", "cat", "house", "tree", "car", "idea", "plan", "city", "river", "book", "table", "market"],
    "VBD": ["saw", "ate", "took", "made", "found", "gave", "left", "held"],
    "IN": ["in", "on", "at", "with", "from", "under", "near", "by"],
    "RB": ["quickly", "often", "never", "soon", "very", "rather"],
    "CC": ["and", "or", "but"],
    "TO": ["to"],
    "VB": ["run", "see", "go", "eat", "build", "read"],
    "PRP": ["he", "she", "it", "they", "we"],
    ",": [","],
}
FILLER_TAGS = ("VBD", "IN", "RB", "CC", "TO", "VB", "PRP", ",")


def parse_pattern(pattern: str) -> list[tuple[str, bool]]:
    """``"DT JJ* NN"`` -> ``[("DT", False), ("JJ", True), ("NN", False)]``."""
    elements = []
    for part in pattern.split():
        starred = part.endswith("*")
        tag = part.rstrip("*")
        if not tag:
            raise ValueError(f"bad pattern element {part!r}")
        elements.append((tag, starred))
    if not elements or all(starred for _, starred in elements):
        raise ValueError(f"pattern {pattern!r} must contain a required element")
    return elements


def _word(rng: random.Random, tag: str) -> str:
    words = VOCAB.get(tag)
    if words is None:
        return f"{tag.lower()}{rng.randrange(5)}"
    return rng.choice(words)


def generate_pattern_corpus(n: int, seed: int = 0, pattern: str = DEFAULT_PATTERN,
                            fillers=FILLER_TAGS, phrase_prob: float = 0.45) -> list[AnnotatedSentence]:
    """Sentences of filler runs and pattern phrases; every phrase is a gold span.

    Filler tags must not occur in the pattern, so gold spans are exactly the
    maximal pattern matches.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    elements = parse_pattern(pattern)
    pattern_tags = {t for t, _ in elements}
    fillers = [t for t in fillers if t not in pattern_tags]
    if not fillers:
        raise ValueError("no filler tags left outside the pattern")
    rng = random.Random(seed)
    corpus = []
    for _ in range(n):
        tokens, spans = [], []
        for _ in range(rng.randint(2, 7)):
            if rng.random() < phrase_prob:
                start = len(tokens)
                for tag, starred in elements:
                    for _ in range(rng.randint(0, MAX_REPEAT) if starred else 1):
                        tokens.append(Token(_word(rng, tag), tag))
                spans.append(PhraseSpan(start, len(tokens) - 1))
            else:
                for _ in range(rng.randint(1, 3)):
                    tag = rng.choice(fillers)
                    tokens.append(Token(_word(rng, tag), tag))
        if not tokens:
            tag = rng.choice(fillers)
            tokens.append(Token(_word(rng, tag), tag))
        corpus.append(AnnotatedSentence(tuple(tokens), tuple(spans), "NP"))
    return corpus


def generate_distance_corpus(n: int, seed: int = 0) -> list[AnnotatedSentence]:
    """Phrases ``S N^r V`` (r = 3..6) whose closing V looks locally like later V's.

    After each phrase comes a run of N's and another V at distance 8 or more from
    the phrase start, so a close decision that cannot see the open bracket has
    no local cue separating the phrase-final V from the later one.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = random.Random(seed)
    corpus = []
    nouns = [f"n{i}" for i in range(20)]
    verbs = [f"v{i}" for i in range(20)]
    for _ in range(n):
        tokens, spans = [], []
        for _ in range(rng.randint(1, 2)):
            for _ in range(rng.randint(1, 2)):
                tokens.append(Token(rng.choice(["x", "y", "z"]), "F"))
            start = len(tokens)
            tokens.append(Token("s", "S"))
            for _ in range(rng.randint(3, 6)):
                tokens.append(Token(rng.choice(nouns), "N"))
            tokens.append(Token(rng.choice(verbs), "V"))
            spans.append(PhraseSpan(start, len(tokens) - 1))
            for _ in range(rng.randint(4, 6)):
                tokens.append(Token(rng.choice(nouns), "N"))
            tokens.append(Token(rng.choice(verbs), "V"))
            for _ in range(3):
                tokens.append(Token(rng.choice(nouns), "N"))
        corpus.append(AnnotatedSentence(tuple(tokens), tuple(spans), "SV"))
    return corpus


PATTERNS = {"distance": generate_distance_corpus}


def generate(pattern: str, n: int, seed: int = 0) -> list[AnnotatedSentence]:
    if pattern in PATTERNS:
        return PATTERNS[pattern](n, seed)
    return generate_pattern_corpus(n, seed, pattern)
