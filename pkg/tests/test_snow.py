import math
import random

import pytest
from hypothesis import given, settings, strategies as st

from snowchunk.snow import (Example, ModelFormatError, SnowUnit, create_unit, gamma, load_unit,
                            save_unit)

FEATURES = [f"f{i}" for i in range(8)]


def test_create_unit():
    unit = create_unit(["O", "I", "B"], 5, 1.5, 0.7, 1)
    assert unit.target_names == ["O", "I", "B"]
    assert all(not t.weights for t in unit.targets.values())
    assert create_unit(["yes", "no"]).target_names == ["yes", "no"]


@pytest.mark.parametrize("kwargs", [
    dict(targets=[]),
    dict(targets=["a", "a"]),
    dict(targets=["a"], alpha=1.0),
    dict(targets=["a"], beta=1.0),
    dict(targets=["a"], beta=0.0),
    dict(targets=["a"], theta=0),
    dict(targets=["a"], w0=0),
])
def test_create_unit_rejects_bad_parameters(kwargs):
    with pytest.raises(ValueError):
        create_unit(**kwargs)


def test_activation():
    unit = create_unit(["yes", "no"])
    assert unit.activation("yes", {"f1", "f2", "f9"}) == 0
    unit.targets["yes"].weights.update(f1=4.0, f2=3.0)
    assert unit.activation("yes", {"f1", "f2", "f9"}) == 7
    unit.targets["no"].weights.update(f1=1.5)
    assert unit.activation("no", set()) == 0
    with pytest.raises(KeyError):
        unit.activation("maybe", {"f1"})


def test_train_example_allocates_then_promotes():
    unit = create_unit(["yes", "no"], theta=5, alpha=1.5, w0=1)
    report = unit.train_example(Example({"f1", "f2", "f3"}, "yes"))
    assert report == {"yes": True, "no": False}
    assert unit.targets["yes"].weights == {"f1": 1.5, "f2": 1.5, "f3": 1.5}
    assert unit.targets["no"].weights == {}


def test_train_example_demotes_false_positive():
    unit = create_unit(["yes", "no"], theta=5, beta=0.7)
    unit.targets["no"].weights.update(f1=4.0, f2=3.0)
    report = unit.train_example(Example({"f1", "f2"}, "yes"))
    assert report["no"] is True
    assert unit.targets["no"].weights == pytest.approx({"f1": 2.8, "f2": 2.1})


def test_train_example_no_update_when_correct():
    unit = create_unit(["yes", "no"])
    unit.targets["yes"].weights["f1"] = 6.0
    assert unit.train_example(Example({"f1"}, "yes")) == {"yes": False, "no": False}
    assert unit.targets["yes"].weights == {"f1": 6.0}


def test_threshold_equality_predicts_zero():
    unit = create_unit(["yes", "no"], theta=5)
    unit.targets["yes"].weights.update({f: 1.0 for f in FEATURES[:5]})
    assert unit.train_example(Example(FEATURES[:5], "yes"))["yes"] is True


def test_unknown_label():
    with pytest.raises(KeyError):
        create_unit(["yes", "no"]).train_example(Example({"f1"}, "maybe"))


def test_train_corpus_empty_and_cycles():
    unit = create_unit(["yes", "no"])
    assert unit.train_corpus([], 2) == [0, 0]
    assert all(not t.weights for t in unit.targets.values())
    with pytest.raises(ValueError):
        unit.train_corpus([], 0)


def test_single_example_two_cycles():
    # cycle 1: allocate 2 links at 1.0, activation 2 <= 5 -> promote to 1.5 each.
    # cycle 2: activation 3 <= 5 -> still a mistake, promote to 2.25 each.
    unit = create_unit(["yes", "no"])
    assert unit.train_corpus([Example({"a", "b"}, "yes")], 2) == [1, 1]
    assert unit.targets["yes"].weights == {"a": 2.25, "b": 2.25}
    # six features: activation 6 > 5 at once, no mistakes at all
    unit = create_unit(["yes", "no"])
    assert unit.train_corpus([Example(FEATURES[:6], "yes")], 2) == [0, 0]


def _separable_set(seed=0, n=300):
    rng = random.Random(seed)
    examples = []
    for _ in range(n):
        active = rng.sample(FEATURES, 3)
        examples.append(Example(active, "yes" if {"f0", "f1"} & set(active) else "no"))
    return examples


def test_train_corpus_mistakes_do_not_grow():
    unit = create_unit(["yes", "no"])
    first, second = unit.train_corpus(_separable_set(), 2)
    assert second <= first


def test_predict():
    unit = create_unit(["O", "I", "B"])
    for t, w in zip("OIB", (4.2, 7.9, 1.0)):
        unit.targets[t].weights["f"] = w
    label, acts = unit.predict({"f"})
    assert label == "I"
    assert acts == {"O": 4.2, "I": 7.9, "B": 1.0}
    assert create_unit(["O", "I", "B"]).predict({"f"})[0] == "O"
    assert create_unit(["only"]).predict({"f"})[0] == "only"


@pytest.mark.parametrize("t_yes, t_no, expected", [(6, 2, 0.75), (0, 0, 0.5), (0, 5, 0.0)])
def test_confidence(t_yes, t_no, expected):
    assert gamma(t_yes, t_no) == expected
    unit = create_unit(["yes", "no"])
    if t_yes:
        unit.targets["yes"].weights["f"] = float(t_yes)
    if t_no:
        unit.targets["no"].weights["f"] = float(t_no)
    assert unit.confidence("yes", "no", {"f"}) == expected
    with pytest.raises(KeyError):
        unit.confidence("yes", "nope", {"f"})


def test_save_load_empty():
    unit = create_unit(["O", "I", "B"])
    text = save_unit(unit)
    assert text.count("\n") == 1 and text.startswith("snow v1 theta=5.0 alpha=1.5 beta=0.7 w0=1.0 targets=O,I,B")
    loaded = load_unit(text)
    assert loaded.target_names == ["O", "I", "B"]
    assert save_unit(loaded) == text


def test_save_load_trained_preserves_predictions():
    examples = _separable_set(seed=3)
    unit = create_unit(["yes", "no"])
    unit.train_corpus(examples, 2)
    loaded = load_unit(save_unit(unit))
    for ex in examples:
        assert loaded.predict(ex.active) == unit.predict(ex.active)


def test_load_errors():
    unit = create_unit(["yes", "no"])
    unit.train_corpus(_separable_set(), 1)
    lines = save_unit(unit).splitlines(keepends=True)
    with pytest.raises(ModelFormatError):
        load_unit("".join(lines[:-2]))
    with pytest.raises(ModelFormatError, match="line 3"):
        load_unit("".join(lines[:2]) + "yes\tf1\n" + "".join(lines[3:]))
    with pytest.raises(ModelFormatError, match="line 1"):
        load_unit("bogus\n")
    with pytest.raises(ModelFormatError):
        load_unit("")


examples_strategy = st.lists(
    st.tuples(st.sets(st.sampled_from(FEATURES), min_size=1, max_size=6), st.sampled_from(["a", "b", "c"])),
    max_size=60,
)


def _reachable(w, alpha=1.5, beta=0.7, w0=1.0, limit=200):
    for a in range(limit):
        for b in range(limit):
            v = w0 * alpha ** a * beta ** b
            if math.isclose(v, w, rel_tol=1e-9):
                return True
            if v < w * 0.5:
                break
    return False


@settings(max_examples=60, deadline=None)
@given(examples_strategy)
def test_training_invariants(data):
    unit = create_unit(["a", "b", "c"])
    seen = {"a": set(), "b": set(), "c": set()}
    for active, label in data:
        before = {t: dict(u.weights) for t, u in unit.targets.items()}
        report = unit.train_example(Example(active, label))
        seen[label] |= active
        for t, u in unit.targets.items():
            if not report[t]:
                # no mistake: only fresh w0 links may have appeared
                changed = {f for f in u.weights if before[t].get(f) != u.weights[f]}
                assert all(f not in before[t] and u.weights[f] == unit.w0 for f in changed)
    for t, u in unit.targets.items():
        assert set(u.weights) <= seen[t]
        assert all(w > 0 and _reachable(w) for w in u.weights.values())


@given(st.floats(0.01, 100))
def test_predict_scale_invariant(scale):
    unit = create_unit(["a", "b", "c"])
    unit.train_corpus([Example(a, l) for a, l in [({"f1", "f2"}, "a"), ({"f2", "f3"}, "b"), ({"f1"}, "c")]], 2)
    query = {"f1", "f2", "f3"}
    label = unit.predict(query)[0]
    for u in unit.targets.values():
        for f in u.weights:
            u.weights[f] *= scale
    assert unit.predict(query)[0] == label
