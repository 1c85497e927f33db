"""Feature and learner settings shared by both pipelines, plus model bundle IO."""

from __future__ import annotations

import json
import os
from dataclasses import asdict, dataclass, field

from . import snow
from .features import DEFAULT_TAGS, DEFAULT_WORDS, FeatureTemplate
from .snow import ModelFormatError, SnowUnit


@dataclass(frozen=True)
class FeatureConfig:
    tags: FeatureTemplate | None = DEFAULT_TAGS
    words: FeatureTemplate | None = DEFAULT_WORDS  # None = no lexical features
    oib_window: int = 3
    oib_bigrams: str = "oib"  # or "words"

    @property
    def lexical(self) -> bool:
        return self.words is not None

    def to_dict(self) -> dict:
        return {
            "tags": asdict(self.tags) if self.tags else None,
            "words": asdict(self.words) if self.words else None,
            "oib_window": self.oib_window,
            "oib_bigrams": self.oib_bigrams,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "FeatureConfig":
        return cls(
            FeatureTemplate(**d["tags"]) if d.get("tags") else None,
            FeatureTemplate(**d["words"]) if d.get("words") else None,
            int(d.get("oib_window", 3)),
            d.get("oib_bigrams", "oib"),
        )


@dataclass(frozen=True)
class SnowParams:
    theta: float = snow.THETA
    alpha: float = snow.ALPHA
    beta: float = snow.BETA
    w0: float = snow.W0
    cycles: int = snow.CYCLES

    def unit(self, targets) -> SnowUnit:
        return SnowUnit(targets, self.theta, self.alpha, self.beta, self.w0)


@dataclass
class TrainingLog:
    """Per-cycle mistake counts, keyed by predictor name."""

    mistakes: dict = field(default_factory=dict)

    def summary(self) -> str:
        return "\n".join(f"{name}: mistakes per cycle {counts}" for name, counts in self.mistakes.items())


META_FILE = "meta.json"


def write_bundle(directory, units: dict[str, SnowUnit], meta: dict) -> None:
    os.makedirs(directory, exist_ok=True)
    for name, unit in units.items():
        unit.save(os.path.join(directory, f"{name}.snow"))
    with open(os.path.join(directory, META_FILE), "w", encoding="utf-8") as f:
        json.dump(meta, f, indent=2, sort_keys=True)
        f.write("\n")


def read_bundle(directory, names, method: str) -> tuple[dict[str, SnowUnit], dict]:
    meta = read_meta(directory)
    if not isinstance(meta, dict) or meta.get("method") != method:
        found = meta.get("method") if isinstance(meta, dict) else None
        raise ModelFormatError(f"bundle holds a {found!r} model, not {method}")
    units = {}
    for name in names:
        path = os.path.join(directory, f"{name}.snow")
        try:
            units[name] = SnowUnit.load(path)
        except ModelFormatError as e:
            raise ModelFormatError(f"{path}: {e}") from None
    return units, meta


def read_meta(directory) -> dict:
    try:
        with open(os.path.join(directory, META_FILE), encoding="utf-8") as f:
            return json.load(f)
    except json.JSONDecodeError as e:
        raise ModelFormatError(f"{META_FILE}: {e}") from None
