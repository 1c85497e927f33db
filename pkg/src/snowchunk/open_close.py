"""Bracket prediction: open and close predictors feeding the combinator.

The close predictor is always queried relative to one open bracket and (unless
disabled) receives features describing that bracket. Both predictors emit a
confidence instead of a hard decision, and every bracket whose confidence
reaches its threshold becomes a candidate for the combinator.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

from .combinator import BracketCandidate, Kind, best_pairing, close_bracket, open_bracket
from .config import FeatureConfig, SnowParams, TrainingLog, read_bundle, write_bundle
from .corpus import AnnotatedSentence, PhraseSpan
from .evaluation import BracketAccuracy, Metrics, binary_accuracy, chunk_metrics
from .features import extract_close_link, sentence_base_features
from .snow import Example, ModelFormatError, SnowUnit, gamma

YES, NO = "yes", "no"
TARGETS = (YES, NO)
METHOD = "open-close"
LMAX = 40
DEFAULT_GRID = tuple(round(0.20 + 0.05 * i, 2) for i in range(13))


@dataclass
class OcModel:
    open: SnowUnit
    close: SnowUnit
    features: FeatureConfig = field(default_factory=FeatureConfig)
    l_max: int = LMAX
    use_link: bool = True
    tau_open: float = 0.5
    tau_close: float = 0.5
    log: TrainingLog = field(default_factory=TrainingLog)

    def __post_init__(self):
        if self.l_max < 1:
            raise ValueError("l_max must be >= 1")

    def base_features(self, sentence):
        return sentence_base_features(sentence, self.features.tags, self.features.words)

    def close_features(self, sentence, base, j, i):
        if self.use_link:
            return base[j] | extract_close_link(sentence, j, i)
        return base[j]

    def scorer(self, sentence) -> "SentenceScorer":
        return SentenceScorer(self, sentence)

    def chunk(self, sentence, tau_open=None, tau_close=None) -> list[PhraseSpan]:
        tau_open = self.tau_open if tau_open is None else tau_open
        tau_close = self.tau_close if tau_close is None else tau_close
        return self.scorer(sentence).chunk(tau_open, tau_close)

    # -- persistence -------------------------------------------------------

    def save(self, directory) -> None:
        meta = {
            "method": METHOD,
            "features": self.features.to_dict(),
            "l_max": self.l_max,
            "use_link": self.use_link,
            "tau_open": self.tau_open,
            "tau_close": self.tau_close,
        }
        write_bundle(directory, {"open": self.open, "close": self.close}, meta)

    @classmethod
    def load(cls, directory) -> "OcModel":
        units, meta = read_bundle(directory, ["open", "close"], METHOD)
        for unit in units.values():
            if unit.target_names != list(TARGETS):
                raise ModelFormatError(f"expected targets {TARGETS}, got {unit.target_names}")
        return cls(units["open"], units["close"], FeatureConfig.from_dict(meta["features"]),
                   int(meta["l_max"]), bool(meta.get("use_link", True)),
                   float(meta["tau_open"]), float(meta["tau_close"]))


class SentenceScorer:
    """Caches one sentence's features and base activations for repeated queries."""

    def __init__(self, model: OcModel, sentence):
        self.model = model
        self.sentence = sentence
        self.base = model.base_features(sentence)
        self.n = len(self.base)
        self._open_gamma = None
        self._close_base = None
        self._close_gamma: dict[int, list[float]] = {}

    def open_gammas(self) -> list[float]:
        if self._open_gamma is None:
            u = self.model.open
            self._open_gamma = [u.confidence(YES, NO, f) for f in self.base]
        return self._open_gamma

    def close_gammas(self, i: int, l_max: int | None = None) -> list[float]:
        """Close confidences for j = i .. i + l_max - 1, relative to an open bracket at i."""
        l_max = self.model.l_max if l_max is None else l_max
        key = i if l_max == self.model.l_max else (i, l_max)
        if key in self._close_gamma:
            return self._close_gamma[key]
        yes, no = self.model.close.targets[YES], self.model.close.targets[NO]
        if self._close_base is None:
            # features are disjoint across channels, so activations add up
            self._close_base = [(yes.activation(f), no.activation(f)) for f in self.base]
        out = []
        for j in range(i, min(i + l_max, self.n)):
            t_yes, t_no = self._close_base[j]
            if self.model.use_link:
                link = extract_close_link(self.sentence, j, i)
                t_yes += yes.activation(link)
                t_no += no.activation(link)
            out.append(gamma(t_yes, t_no))
        self._close_gamma[key] = out
        return out

    def open_candidates(self, tau_open: float) -> list[BracketCandidate]:
        return [open_bracket(i, g) for i, g in enumerate(self.open_gammas()) if g >= tau_open]

    def close_candidates(self, o: BracketCandidate, tau_close: float,
                         l_max: int | None = None) -> list[BracketCandidate]:
        if o.kind is not Kind.OPEN:
            raise ValueError("close candidates are generated for open candidates only")
        gammas = self.close_gammas(o.word_index, l_max)
        return [close_bracket(o.word_index + k, g, o) for k, g in enumerate(gammas) if g >= tau_close]

    def chunk(self, tau_open: float, tau_close: float) -> list[PhraseSpan]:
        opens = self.open_candidates(tau_open)
        closes = [c for o in opens for c in self.close_candidates(o, tau_close)]
        pairing = best_pairing(opens, closes, self.n)
        return [PhraseSpan(o, c) for o, c in pairing.spans]


def train_oc(corpus: Sequence[AnnotatedSentence], features: FeatureConfig | None = None,
             params: SnowParams | None = None, l_max: int = LMAX, use_link: bool = True) -> OcModel:
    """Train the open predictor on every word and the close predictor inside gold open scopes.

    Close examples for a gold phrase starting at i cover words i .. i + l_max - 1;
    the phrase's last word is the only positive.
    """
    if not corpus:
        raise ValueError("cannot train on an empty corpus")
    features = features or FeatureConfig()
    params = params or SnowParams()
    model = OcModel(params.unit(TARGETS), params.unit(TARGETS), features, l_max, use_link)

    open_examples, close_examples = [], []
    for sent in corpus:
        base = model.base_features(sent)
        starts = {s.start for s in sent.gold_spans}
        for i, f in enumerate(base):
            open_examples.append(Example(f, YES if i in starts else NO))
        for span in sent.gold_spans:
            i = span.start
            for j in range(i, min(i + l_max, len(sent))):
                close_examples.append(Example(model.close_features(sent, base, j, i),
                                              YES if j == span.end else NO))
    model.log.mistakes["open"] = model.open.train_corpus(open_examples, params.cycles)
    model.log.mistakes["close"] = model.close.train_corpus(close_examples, params.cycles)
    return model


def open_candidates(model: OcModel, sentence, tau_open: float) -> list[BracketCandidate]:
    return model.scorer(sentence).open_candidates(tau_open)


def close_candidates(model: OcModel, sentence, open: BracketCandidate, tau_close: float,
                     l_max: int | None = None) -> list[BracketCandidate]:
    return model.scorer(sentence).close_candidates(open, tau_close, l_max)


def chunk_oc(model: OcModel, sentence, tau_open: float | None = None,
             tau_close: float | None = None) -> list[PhraseSpan]:
    return model.chunk(sentence, tau_open, tau_close)


def tune_thresholds(model: OcModel, dev: Sequence[AnnotatedSentence],
                    grid: Sequence[float] = DEFAULT_GRID, threads: int = 1):
    """Grid search over (tau_open, tau_close) maximising dev F1.

    Ties go to the smaller tau_open, then the smaller tau_close.
    Returns ``(tau_open, tau_close, f1)``.
    """
    if not grid:
        raise ValueError("empty threshold grid")
    if not dev:
        raise ValueError("empty dev corpus")
    grid = sorted(set(grid))
    scorers = [model.scorer(s) for s in dev]
    points = [(to, tc) for to in grid for tc in grid]

    def evaluate(point):
        to, tc = point
        total = Metrics()
        for sent, sc in zip(dev, scorers):
            total = total + chunk_metrics(sent.gold_spans, sc.chunk(to, tc))
        return total.f_beta

    # warm the caches once so worker threads only read them
    for sc in scorers:
        sc.open_gammas()
        for i in range(sc.n):
            sc.close_gammas(i)
    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            scores = list(pool.map(evaluate, points))
    else:
        scores = [evaluate(p) for p in points]

    best = None
    for (to, tc), f in zip(points, scores):
        if best is None or f > best[2]:
            best = (to, tc, f)
    return best


def grid_scores(model: OcModel, dev: Sequence[AnnotatedSentence], grid: Sequence[float]):
    """F1 for every grid point, straightforwardly re-evaluated (no shared caches)."""
    out = {}
    for to in grid:
        for tc in grid:
            total = Metrics()
            for sent in dev:
                total = total + chunk_metrics(sent.gold_spans, chunk_oc(model, sent, to, tc))
            out[(to, tc)] = total.f_beta
    return out


def close_accuracy(model: OcModel, corpus: Sequence[AnnotatedSentence], tau: float = 0.5) -> BracketAccuracy:
    """Word-level close-predictor accuracy when fed the correct open brackets.

    Scores every word in each gold phrase's scope (start .. start + l_max - 1).
    """
    total = BracketAccuracy()
    for sent in corpus:
        sc = model.scorer(sent)
        for span in sent.gold_spans:
            gammas = sc.close_gammas(span.start)
            gold = [span.start + k == span.end for k in range(len(gammas))]
            total = total + binary_accuracy(gold, [g >= tau for g in gammas])
    return total


def open_accuracy(model: OcModel, corpus: Sequence[AnnotatedSentence], tau: float = 0.5) -> BracketAccuracy:
    total = BracketAccuracy()
    for sent in corpus:
        starts = {s.start for s in sent.gold_spans}
        gammas = model.scorer(sent).open_gammas()
        total = total + binary_accuracy([i in starts for i in range(len(gammas))],
                                        [g >= tau for g in gammas])
    return total
