"""O/I/B tagging with two chained predictors.

The first predictor labels each word from its tag/word context. The second sees
the same features plus the O/I/B statuses of the neighbouring words; at
prediction time those statuses come from the first predictor's full labelling.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .config import FeatureConfig, SnowParams, TrainingLog, read_bundle, write_bundle
from .corpus import AnnotatedSentence, OibLabel, PhraseSpan, oib_to_spans, spans_to_oib
from .features import extract_oib_context, sentence_base_features
from .snow import Example, ModelFormatError, SnowUnit

TARGETS = ("O", "I", "B")
METHOD = "inside-outside"


@dataclass
class IoModel:
    first: SnowUnit
    second: SnowUnit
    features: FeatureConfig = field(default_factory=FeatureConfig)
    use_second: bool = True
    second_context: str = "gold"
    log: TrainingLog = field(default_factory=TrainingLog)

    def base_features(self, sentence):
        return sentence_base_features(sentence, self.features.tags, self.features.words)

    def context_features(self, labels, words, index):
        return extract_oib_context(labels, words, index, self.features.oib_window,
                                   self.features.oib_bigrams)

    def first_stage(self, sentence, base=None) -> list[OibLabel]:
        base = self.base_features(sentence) if base is None else base
        return [OibLabel(self.first.predict(f)[0]) for f in base]

    def predict_oib(self, sentence) -> list[OibLabel]:
        base = self.base_features(sentence)
        stage1 = self.first_stage(sentence, base)
        if not self.use_second:
            return stage1
        words = [t.word for t in _tokens(sentence)]
        return [OibLabel(self.second.predict(base[i] | self.context_features(stage1, words, i))[0])
                for i in range(len(base))]

    def chunk(self, sentence) -> list[PhraseSpan]:
        return oib_to_spans(self.predict_oib(sentence))

    # -- persistence -------------------------------------------------------

    def save(self, directory) -> None:
        meta = {
            "method": METHOD,
            "features": self.features.to_dict(),
            "use_second": self.use_second,
            "second_context": self.second_context,
        }
        write_bundle(directory, {"first": self.first, "second": self.second}, meta)

    @classmethod
    def load(cls, directory) -> "IoModel":
        units, meta = read_bundle(directory, ["first", "second"], METHOD)
        for unit in units.values():
            if unit.target_names != list(TARGETS):
                raise ModelFormatError(f"expected targets {TARGETS}, got {unit.target_names}")
        return cls(units["first"], units["second"], FeatureConfig.from_dict(meta["features"]),
                   bool(meta.get("use_second", True)), meta.get("second_context", "gold"))


def train_io(corpus: Sequence[AnnotatedSentence], features: FeatureConfig | None = None,
             params: SnowParams | None = None, use_second: bool = True,
             second_context: str = "gold") -> IoModel:
    """Train both predictors.

    ``second_context="gold"`` builds the second predictor's context from the gold
    labels; ``"predicted"`` uses the trained first predictor's output instead.
    """
    if not corpus:
        raise ValueError("cannot train on an empty corpus")
    if second_context not in ("gold", "predicted"):
        raise ValueError(f"unknown second_context {second_context!r}")
    features = features or FeatureConfig()
    params = params or SnowParams()
    model = IoModel(params.unit(TARGETS), params.unit(TARGETS), features, use_second, second_context)

    base = [model.base_features(s) for s in corpus]
    gold = [[str(x) for x in spans_to_oib(len(s), s.gold_spans)] for s in corpus]
    first_examples = [Example(f, lab) for feats, labels in zip(base, gold)
                      for f, lab in zip(feats, labels)]
    model.log.mistakes["first"] = model.first.train_corpus(first_examples, params.cycles)

    second_examples = []
    for sent, feats, labels in zip(corpus, base, gold):
        context = labels if second_context == "gold" else model.first_stage(sent, feats)
        words = sent.words
        for i, f in enumerate(feats):
            second_examples.append(Example(f | model.context_features(context, words, i), labels[i]))
    model.log.mistakes["second"] = model.second.train_corpus(second_examples, params.cycles)
    return model


def predict_oib(model: IoModel, sentence) -> list[OibLabel]:
    return model.predict_oib(sentence)


def chunk_io(model: IoModel, sentence) -> list[PhraseSpan]:
    return model.chunk(sentence)


def _tokens(sentence):
    return sentence.tokens if isinstance(sentence, AnnotatedSentence) else sentence
