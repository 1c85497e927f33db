import pytest
from hypothesis import given, settings, strategies as st

from snowchunk.combinator import Kind, open_bracket
from snowchunk.config import SnowParams
from snowchunk.corpus import AnnotatedSentence, PhraseSpan, Token, parse_corpus
from snowchunk.open_close import (DEFAULT_GRID, NO, YES, OcModel, chunk_oc, close_accuracy,
                                  close_candidates, grid_scores, open_accuracy, open_candidates,
                                  train_oc, tune_thresholds)
from snowchunk.snow import ModelFormatError
from snowchunk.synth import generate_pattern_corpus

from test_corpus import CALIFORNIA


def untrained():
    params = SnowParams()
    return OcModel(params.unit([YES, NO]), params.unit([YES, NO]))


def test_default_grid():
    assert DEFAULT_GRID[0] == 0.2 and DEFAULT_GRID[-1] == 0.8 and len(DEFAULT_GRID) == 13


def test_single_sentence_chunking():
    [sent] = parse_corpus(CALIFORNIA)
    model = train_oc([sent])
    assert chunk_oc(model, sent) == [PhraseSpan(0, 0), PhraseSpan(3, 3), PhraseSpan(4, 5)]


def test_open_predictor_accuracy(oc_model, synth_test):
    assert open_accuracy(oc_model, synth_test).overall >= 0.99


def test_close_predictor_accuracy(oc_model, synth_test):
    acc = close_accuracy(oc_model, synth_test)
    assert acc.positive_only == 1.0
    assert acc.overall >= 0.99


def _tagged(tags):
    return AnnotatedSentence(tuple(Token(t.lower(), t) for t in tags))


def test_close_features_collide_across_an_intervening_phrase():
    # a true close four words after the open, and a false one seven words after
    # it behind another phrase, get identical feature sets
    model = untrained()
    pos = _tagged("DT JJ JJ JJ NN VB".split())
    neg = _tagged("DT JJ NN DT JJ JJ JJ NN VB".split())
    a = model.close_features(pos, model.base_features(pos), 4, 0)
    b = model.close_features(neg, model.base_features(neg), 7, 0)
    assert a == b


def test_no_phrases_corpus():
    corpus = [s.with_spans([]) for s in generate_pattern_corpus(50, seed=3)]
    model = train_oc(corpus)
    for sent in generate_pattern_corpus(20, seed=4):
        assert all(g <= 0.5 for g in model.scorer(sent).open_gammas())


def test_empty_corpus():
    with pytest.raises(ValueError):
        train_oc([])


def test_candidate_thresholds_extremes(small_train):
    sent = small_train[0]
    model = untrained()
    assert [c.word_index for c in open_candidates(model, sent, 0.0)] == list(range(len(sent)))
    assert open_candidates(model, sent, 1.0) == []
    assert chunk_oc(model, sent, 1.0, 1.0) == []


def test_close_candidates_scope(small_oc, small_train):
    sent = max(small_train, key=len)
    o = open_bracket(1, 0.9)
    assert [c.word_index for c in close_candidates(small_oc, sent, o, 0.0, l_max=1)] == [1]
    everything = close_candidates(small_oc, sent, o, 0.0)
    assert [c.word_index for c in everything] == list(range(1, len(sent)))
    assert all(c.origin is o and c.kind is Kind.CLOSE for c in everything)
    capped = close_candidates(small_oc, sent, o, 0.0, l_max=3)
    assert [c.word_index for c in capped] == [1, 2, 3]


def test_close_rows_are_independent(small_oc, small_train):
    sent = max(small_train, key=len)
    sc = small_oc.scorer(sent)
    # the same word gets a separate confidence in each open bracket's row
    rows = [sc.close_gammas(i) for i in range(3)]
    assert len({round(r[2 - i], 12) for i, r in enumerate(rows)}) >= 1
    assert all(0 <= g <= 1 for r in rows for g in r)


@settings(max_examples=25, deadline=None)
@given(st.floats(0, 1), st.floats(0, 1), st.integers(0, 399))
def test_candidate_monotonicity(small_oc, small_train, t1, t2, k):
    lo, hi = min(t1, t2), max(t1, t2)
    sent = small_train[k]
    big = {c.word_index for c in open_candidates(small_oc, sent, lo)}
    assert {c.word_index for c in open_candidates(small_oc, sent, hi)} <= big
    o = open_bracket(0, 1.0)
    big = {c.word_index for c in close_candidates(small_oc, sent, o, lo)}
    assert {c.word_index for c in close_candidates(small_oc, sent, o, hi)} <= big


@settings(max_examples=40, deadline=None)
@given(st.floats(0, 1), st.floats(0, 1), st.integers(0, 399))
def test_output_spans_do_not_overlap(small_oc, small_train, to, tc, k):
    spans = chunk_oc(small_oc, small_train[k], to, tc)
    for a, b in zip(spans, spans[1:]):
        assert a.end < b.start


def test_tune_singleton_grid(small_oc, small_train):
    to, tc, f = tune_thresholds(small_oc, small_train[:50], [0.5])
    assert (to, tc) == (0.5, 0.5)
    assert f == grid_scores(small_oc, small_train[:50], [0.5])[(0.5, 0.5)]


def test_tune_finds_grid_maximum():
    # a weakly trained model so the grid actually matters
    train = generate_pattern_corpus(60, seed=21)
    dev = generate_pattern_corpus(60, seed=22)
    model = train_oc(train, params=SnowParams(cycles=1))
    grid = [0.2, 0.35, 0.5, 0.65, 0.8]
    to, tc, f = tune_thresholds(model, dev, grid)
    scores = grid_scores(model, dev, grid)
    assert f == max(scores.values())
    assert scores[(to, tc)] == f
    first = min(p for p, v in scores.items() if v == f)
    assert (to, tc) == first


def test_tune_tie_break(oc_model, synth_test):
    # the synthetic model is perfect on a wide band, so every grid point ties
    to, tc, f = tune_thresholds(oc_model, synth_test[:40], [0.45, 0.4, 0.5])
    assert f == 1.0
    assert (to, tc) == (0.4, 0.4)


def test_tune_threads_agree(small_oc, small_train):
    dev = small_train[:40]
    assert tune_thresholds(small_oc, dev, [0.3, 0.5, 0.7], threads=4) == \
        tune_thresholds(small_oc, dev, [0.3, 0.5, 0.7])


def test_tune_errors(small_oc, small_train):
    with pytest.raises(ValueError):
        tune_thresholds(small_oc, small_train, [])
    with pytest.raises(ValueError):
        tune_thresholds(small_oc, [], [0.5])


def test_bundle_round_trip(tmp_path, small_oc, small_train):
    small_oc.tau_open, small_oc.tau_close = 0.45, 0.55
    try:
        small_oc.save(tmp_path / "m")
        loaded = OcModel.load(tmp_path / "m")
    finally:
        small_oc.tau_open = small_oc.tau_close = 0.5
    assert (loaded.tau_open, loaded.tau_close, loaded.l_max) == (0.45, 0.55, 40)
    for sent in small_train[:30]:
        assert loaded.chunk(sent) == small_oc.chunk(sent, 0.45, 0.55)
    (tmp_path / "m" / "close.snow").write_text("snow v1 nonsense\n")
    with pytest.raises(ModelFormatError):
        OcModel.load(tmp_path / "m")


def test_no_link_training(small_train):
    model = train_oc(small_train[:100], use_link=False)
    assert not any(f.startswith("open|") for u in model.close.targets.values() for f in u.weights)
    with_link = train_oc(small_train[:100])
    assert any(f.startswith("open|") for f in with_link.close.targets[YES].weights)


def test_long_phrases_are_capped():
    tokens = tuple(Token("n", "NN") for _ in range(12))
    sent = AnnotatedSentence(tokens, (PhraseSpan(0, 11),))
    model = train_oc([sent], l_max=5)
    # the gold close lies beyond the cap, so every close example is negative
    assert not model.close.targets[YES].weights
