"""Shallow phrase chunking with chained sparse Winnow predictors."""

from .combinator import BracketCandidate, Pair, Pairing, best_pairing, brute_force_pairing
from .corpus import (AnnotatedSentence, OibLabel, PhraseSpan, Token, oib_to_spans, parse_corpus,
                     read_corpus, spans_to_oib, split_train_dev)
from .evaluation import Metrics, chunk_metrics, corpus_metrics
from .inside_outside import IoModel, chunk_io, train_io
from .open_close import OcModel, chunk_oc, train_oc, tune_thresholds
from .snow import Example, SnowUnit

__version__ = "0.1.0"
