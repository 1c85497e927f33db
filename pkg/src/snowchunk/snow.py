"""Sparse network of Winnow units.

A :class:`SnowUnit` holds one :class:`TargetUnit` per label. Each target keeps a
sparse map from feature id to a positive weight; links are allocated only for
features seen active in an example carrying that target's label, and weights
change multiplicatively, and only on mistakes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Hashable, Iterable, NamedTuple, Sequence

THETA = 5.0
ALPHA = 1.5
BETA = 0.7
W0 = 1.0
CYCLES = 2


class ModelFormatError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class Example(NamedTuple):
    active: Iterable[str]
    label: Hashable


@dataclass
class TargetUnit:
    theta: float = THETA
    alpha: float = ALPHA
    beta: float = BETA
    w0: float = W0
    weights: dict = field(default_factory=dict)

    def activation(self, active: Iterable[str]) -> float:
        w = self.weights
        return sum([w[f] for f in active if f in w])

    def learn(self, active: Sequence[str], positive: bool) -> bool:
        """One Winnow step. Returns True when the unit made a mistake (and updated)."""
        w = self.weights
        if positive:
            w0 = self.w0
            for f in active:
                if f not in w:
                    w[f] = w0
            if sum([w[f] for f in active]) <= self.theta:
                a = self.alpha
                for f in active:
                    w[f] *= a
                return True
            return False
        linked = [f for f in active if f in w]
        if sum([w[f] for f in linked]) > self.theta:
            b = self.beta
            for f in linked:
                w[f] *= b
            return True
        return False


class SnowUnit:
    """A set of competing targets sharing one feature space.

    Target order is fixed at creation and breaks prediction ties.
    """

    def __init__(self, targets: Sequence[str], theta: float = THETA, alpha: float = ALPHA,
                 beta: float = BETA, w0: float = W0):
        targets = list(targets)
        if not targets:
            raise ValueError("a unit needs at least one target")
        if len(set(targets)) != len(targets):
            raise ValueError("targets must be distinct")
        if not alpha > 1:
            raise ValueError("promotion alpha must be > 1")
        if not 0 < beta < 1:
            raise ValueError("demotion beta must be in (0, 1)")
        if not theta > 0:
            raise ValueError("threshold theta must be > 0")
        if not w0 > 0:
            raise ValueError("initial weight w0 must be > 0")
        self.theta, self.alpha, self.beta, self.w0 = float(theta), float(alpha), float(beta), float(w0)
        self.targets: dict[str, TargetUnit] = {
            t: TargetUnit(self.theta, self.alpha, self.beta, self.w0) for t in targets
        }

    def __repr__(self):
        sizes = ", ".join(f"{t}:{len(u.weights)}" for t, u in self.targets.items())
        return f"SnowUnit({sizes}; theta={self.theta}, alpha={self.alpha}, beta={self.beta})"

    @property
    def target_names(self) -> list[str]:
        return list(self.targets)

    def _target(self, target) -> TargetUnit:
        try:
            return self.targets[target]
        except KeyError:
            raise KeyError(f"unknown target {target!r}") from None

    def activation(self, target: str, active: Iterable[str]) -> float:
        return self._target(target).activation(active)

    def activations(self, active: Iterable[str]) -> dict[str, float]:
        active = tuple(active)
        return {t: u.activation(active) for t, u in self.targets.items()}

    def predict(self, active: Iterable[str]) -> tuple[str, dict[str, float]]:
        """Winner-take-all over raw activations; the earliest target wins ties."""
        acts = self.activations(active)
        best = None
        for t, a in acts.items():
            if best is None or a > acts[best]:
                best = t
        return best, acts

    def confidence(self, yes: str, no: str, active: Iterable[str]) -> float:
        active = tuple(active)
        return gamma(self._target(yes).activation(active), self._target(no).activation(active))

    def train_example(self, example: Example) -> dict[str, bool]:
        """Present one example to every target; returns which targets made a mistake."""
        label = example.label
        if label not in self.targets:
            raise KeyError(f"unknown label {label!r}")
        active = tuple(example.active)
        return {t: u.learn(active, t == label) for t, u in self.targets.items()}

    def train_corpus(self, examples: Sequence[Example], cycles: int = CYCLES) -> list[int]:
        """Online passes over `examples` in order.

        Returns, per cycle, the number of examples on which at least one target
        updated.
        """
        if cycles < 1:
            raise ValueError("cycles must be >= 1")
        mistakes = []
        for _ in range(cycles):
            n = 0
            for ex in examples:
                if any(self.train_example(ex).values()):
                    n += 1
            mistakes.append(n)
        return mistakes

    # -- persistence -------------------------------------------------------

    def dumps(self) -> str:
        n_links = sum(len(u.weights) for u in self.targets.values())
        lines = [
            f"snow v1 theta={self.theta!r} alpha={self.alpha!r} beta={self.beta!r} "
            f"w0={self.w0!r} targets={','.join(self.targets)} links={n_links}\n"
        ]
        for t, u in self.targets.items():
            for f in sorted(u.weights):
                lines.append(f"{t}\t{f}\t{u.weights[f]!r}\n")
        return "".join(lines)

    @classmethod
    def loads(cls, text: str) -> "SnowUnit":
        lines = text.splitlines()
        if not lines:
            raise ModelFormatError("empty model file", 1)
        fields = lines[0].split(" ")
        if fields[:2] != ["snow", "v1"]:
            raise ModelFormatError("missing 'snow v1' header", 1)
        try:
            header = dict(kv.split("=", 1) for kv in fields[2:])
            unit = cls(header["targets"].split(","), float(header["theta"]), float(header["alpha"]),
                       float(header["beta"]), float(header["w0"]))
            expected = int(header["links"]) if "links" in header else None
        except (KeyError, ValueError) as e:
            raise ModelFormatError(f"bad header: {e}", 1) from None
        count = 0
        for lineno, line in enumerate(lines[1:], 2):
            parts = line.split("\t")
            if len(parts) != 3:
                raise ModelFormatError(f"expected 3 tab-separated fields, got {len(parts)}", lineno)
            target, feature, weight = parts
            if target not in unit.targets:
                raise ModelFormatError(f"unknown target {target!r}", lineno)
            try:
                value = float(weight)
            except ValueError:
                raise ModelFormatError(f"bad weight {weight!r}", lineno) from None
            if not (value > 0 and math.isfinite(value)):
                raise ModelFormatError(f"weight must be positive, got {weight}", lineno)
            unit.targets[target].weights[feature] = value
            count += 1
        if expected is not None and count != expected:
            raise ModelFormatError(f"truncated model: header promises {expected} links, found {count}",
                                   len(lines))
        return unit

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as f:
            f.write(self.dumps())

    @classmethod
    def load(cls, path) -> "SnowUnit":
        with open(path, encoding="utf-8") as f:
            return cls.loads(f.read())


def gamma(t_yes: float, t_no: float) -> float:
    """Share of the yes activation; 0.5 when both are zero."""
    total = t_yes + t_no
    if total == 0:
        return 0.5
    return t_yes / total


def create_unit(targets, theta=THETA, alpha=ALPHA, beta=BETA, w0=W0) -> SnowUnit:
    return SnowUnit(targets, theta, alpha, beta, w0)


def save_unit(unit: SnowUnit) -> str:
    return unit.dumps()


def load_unit(text: str) -> SnowUnit:
    return SnowUnit.loads(text)
