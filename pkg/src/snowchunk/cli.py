"""Command-line interface: ``snowchunk {train,tune,predict,eval,synth}``."""

from __future__ import annotations

import argparse
import logging
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, fields, replace

from . import inside_outside, open_close
from .config import FeatureConfig, SnowParams, read_meta
from .corpus import (CorpusFormatError, format_sentence, parse_corpus, read_corpus,
                     spans_to_bio, spans_to_oib, split_train_dev)
from .evaluation import (DEFAULT_BUCKETS, BracketAccuracy, bracket_accuracy, corpus_metrics,
                         format_table, length_breakdown, metric_lines, oib_accuracy, pct)
from .features import FeatureTemplate
from .snow import ModelFormatError
from .synth import DEFAULT_PATTERN, generate

log = logging.getLogger("snowchunk")

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_MODEL = 0, 1, 2, 3
METHODS = (inside_outside.METHOD, open_close.METHOD)


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    method: str = open_close.METHOD
    task: str = "np"
    lexical: bool = True
    tag_window: int = 3
    tag_conj: int = 4
    word_window: int = 1
    word_conj: int = 2
    oib_window: int = 3
    oib_bigrams: str = "oib"
    theta: float = 5.0
    alpha: float = 1.5
    beta: float = 0.7
    w0: float = 1.0
    cycles: int = 2
    tau_open: float = 0.5
    tau_close: float = 0.5
    tau_grid: tuple = open_close.DEFAULT_GRID
    lmax: int = open_close.LMAX
    link: bool = True
    second_context: str = "gold"
    seed: int = 0
    threads: int = 1

    def features(self) -> FeatureConfig:
        words = FeatureTemplate(self.word_window, self.word_conj) if self.lexical else None
        return FeatureConfig(FeatureTemplate(self.tag_window, self.tag_conj), words,
                             self.oib_window, self.oib_bigrams)

    def snow_params(self) -> SnowParams:
        return SnowParams(self.theta, self.alpha, self.beta, self.w0, self.cycles)


def _coerce(name: str, value):
    default = RunConfig.__dataclass_fields__[name].default
    if isinstance(value, str):
        if isinstance(default, bool):
            low = value.strip().lower()
            if low not in ("1", "0", "true", "false", "yes", "no"):
                raise UsageError(f"{name}: expected a boolean, got {value!r}")
            return low in ("1", "true", "yes")
        if isinstance(default, tuple):
            return tuple(float(v) for v in value.split(",") if v.strip())
        if isinstance(default, (int, float)):
            return type(default)(value)
    return value


def read_config_file(path) -> dict:
    """Flat ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    known = {f.name for f in fields(RunConfig)}
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            key = key.strip().replace("-", "_")
            if not sep or key not in known:
                raise UsageError(f"{path}:{lineno}: unknown setting {line!r}")
            out[key] = value.strip()
    return out


def resolve_config(args: argparse.Namespace) -> RunConfig:
    """Flags override the config file, which overrides defaults."""
    values = {}
    if getattr(args, "config", None):
        values.update(read_config_file(args.config))
    for f in fields(RunConfig):
        v = getattr(args, f.name, None)
        if v is not None:
            values[f.name] = v
    try:
        cfg = RunConfig(**{k: _coerce(k, v) for k, v in values.items()})
    except ValueError as e:
        raise UsageError(str(e)) from None
    if cfg.method not in METHODS:
        raise UsageError(f"unknown method {cfg.method!r}")
    try:
        cfg.features()
    except ValueError as e:
        raise UsageError(str(e)) from None
    return cfg


# -- models ------------------------------------------------------------------


def train_model(cfg: RunConfig, corpus):
    if cfg.method == inside_outside.METHOD:
        return inside_outside.train_io(corpus, cfg.features(), cfg.snow_params(),
                                       second_context=cfg.second_context)
    model = open_close.train_oc(corpus, cfg.features(), cfg.snow_params(), cfg.lmax, cfg.link)
    model.tau_open, model.tau_close = cfg.tau_open, cfg.tau_close
    return model


def load_model(directory):
    if not os.path.isdir(directory):
        raise FileNotFoundError(f"no model bundle at {directory}")
    method = read_meta(directory).get("method")
    if method == inside_outside.METHOD:
        return inside_outside.IoModel.load(directory)
    if method == open_close.METHOD:
        return open_close.OcModel.load(directory)
    raise ModelFormatError(f"unknown model method {method!r}")


def predict_corpus(model, corpus, threads: int = 1):
    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            return list(pool.map(model.chunk, corpus))
    return [model.chunk(s) for s in corpus]


# -- commands ----------------------------------------------------------------


def cmd_train(args, out) -> int:
    cfg = resolve_config(args)
    corpus = read_corpus(args.train_file)
    if not corpus:
        raise CorpusFormatError(f"{args.train_file}: no sentences")
    model = train_model(cfg, corpus)
    model.save(args.model_out)
    print(f"trained {cfg.method} on {len(corpus)} sentences", file=out)
    print(model.log.summary(), file=out)
    return EXIT_OK


def cmd_tune(args, out) -> int:
    cfg = resolve_config(args)
    if cfg.method != open_close.METHOD:
        raise UsageError("tune applies to open-close only")
    corpus = read_corpus(args.train_file)
    if len(corpus) < 2:
        raise CorpusFormatError(f"{args.train_file}: need at least 2 sentences to tune")
    train, dev = split_train_dev(corpus, 0.1)
    model = train_model(cfg, train)
    tau_open, tau_close, dev_f = open_close.tune_thresholds(model, dev, cfg.tau_grid, cfg.threads)
    print(f"tuned on {len(train)}/{len(dev)} sentences: tau_open={tau_open} tau_close={tau_close} "
          f"dev F={pct(dev_f)}", file=out)
    final = train_model(replace(cfg, tau_open=tau_open, tau_close=tau_close), corpus)
    final.save(args.model_out)
    print(f"retrained on all {len(corpus)} sentences", file=out)
    print(final.log.summary(), file=out)
    return EXIT_OK


def cmd_predict(args, out) -> int:
    model = load_model(args.model)
    cfg = resolve_config(args)
    corpus = read_corpus(args.input_file, columns=None)
    if isinstance(model, open_close.OcModel):
        if args.tau_open is not None:
            model.tau_open = cfg.tau_open
        if args.tau_close is not None:
            model.tau_close = cfg.tau_close
    predictions = predict_corpus(model, corpus, cfg.threads)
    chunks = []
    for sent, spans in zip(corpus, predictions):
        extra = ()
        if sent.annotated:
            gold = spans_to_bio(len(sent), sent.gold_spans, sent.phrase_type)
            extra = tuple((g,) for g in gold)
        sent = type(sent)(sent.tokens, (), sent.phrase_type, extra)
        chunks.append(format_sentence(sent, spans) + "\n")
    with open(args.output_file, "w", encoding="utf-8") as f:
        f.write("".join(chunks))
    print(f"labelled {len(corpus)} sentences", file=out)
    return EXIT_OK


def cmd_eval(args, out) -> int:
    gold = read_corpus(args.gold_file, columns=None)
    pred = read_corpus(args.pred_file, columns=None)
    if len(gold) != len(pred):
        raise CorpusFormatError(f"{len(gold)} gold sentences but {len(pred)} predicted")
    for k, (g, p) in enumerate(zip(gold, pred)):
        if g.words != p.words:
            raise CorpusFormatError(f"sentence {k}: tokens differ between gold and prediction")
        if not g.annotated:
            raise CorpusFormatError(f"sentence {k}: gold file has no chunk column")
    report = evaluate_corpora(gold, pred, args.method or "all", args.breakdown)
    out.write(report)
    return EXIT_OK


def evaluate_corpora(gold, pred, method: str = "all", breakdown: bool = False) -> str:
    g_spans = [s.gold_spans for s in gold]
    p_spans = [s.gold_spans for s in pred]
    m = corpus_metrics(g_spans, p_spans)
    extra_header, extra, lines = [], [], metric_lines("", m)
    if method in ("all", inside_outside.METHOD):
        g_lab = [str(x) for s in gold for x in spans_to_oib(len(s), s.gold_spans)]
        p_lab = [str(x) for s in pred for x in spans_to_oib(len(s), s.gold_spans)]
        acc = oib_accuracy(g_lab, p_lab) if g_lab else 0.0
        extra_header.append("Accuracy")
        extra.append(pct(acc))
        lines.append(f"metric=oib_accuracy value={acc:.6f}")
    if method in ("all", open_close.METHOD):
        for kind in ("open", "close"):
            acc = BracketAccuracy()
            for g, p in zip(gold, pred):
                acc = acc + bracket_accuracy(g.gold_spans, p.gold_spans, kind, len(g))
            extra_header.append(kind.capitalize())
            extra.append(pct(acc.overall))
            lines.append(f"metric={kind}_accuracy value={acc.overall:.6f}")
            lines.append(f"metric={kind}_positive_accuracy value={acc.positive_only:.6f}")
    text = format_table([("all", m)], extra_header, [extra])
    if breakdown:
        rows = length_breakdown(g_spans, p_spans, DEFAULT_BUCKETS)
        text += "\n" + format_table([(b.label, bm) for b, bm in rows])
        for b, bm in rows:
            lines += metric_lines(f"len{b.label}_", bm)
    return text + "\n".join(lines) + "\n"


def cmd_synth(args, out) -> int:
    if args.n < 1:
        raise UsageError("-n must be >= 1")
    corpus = generate(args.pattern, args.n, args.seed)
    text = "".join(format_sentence(s) + "\n" for s in corpus)
    with open(args.out_file, "w", encoding="utf-8") as f:
        f.write(text)
    print(f"wrote {len(corpus)} sentences ({args.pattern}, seed {args.seed})", file=out)
    return EXIT_OK


# -- argument parsing ----------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _add_shared(p: argparse.ArgumentParser) -> None:
    arg = p.add_argument
    arg("--config", help="flat key=value settings file (flags take precedence)")
    arg("--method", choices=METHODS)
    arg("--task", choices=("np", "sv"), help="phrase type label (no effect on learning)")
    arg("--lexical", action=argparse.BooleanOptionalAction, default=None,
        help="include word conjunction features")
    arg("--tag-window", type=int)
    arg("--tag-conj", type=int)
    arg("--word-window", type=int)
    arg("--word-conj", type=int)
    arg("--oib-window", type=int, help="context window for the second O/I/B predictor")
    arg("--oib-bigrams", choices=("oib", "words"))
    arg("--theta", type=float)
    arg("--alpha", type=float)
    arg("--beta", type=float)
    arg("--w0", type=float)
    arg("--cycles", type=int)
    arg("--tau-open", type=float)
    arg("--tau-close", type=float)
    arg("--tau-grid", help="comma-separated thresholds")
    arg("--lmax", type=int, help="longest phrase the close predictor scans")
    arg("--link", action=argparse.BooleanOptionalAction, default=None,
        help="feed open-bracket features to the close predictor")
    arg("--second-context", choices=("gold", "predicted"),
        help="labels used to train the second O/I/B predictor")
    arg("--seed", type=int)
    arg("--threads", type=int, help="worker threads for prediction and tuning")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="snowchunk", description="Winnow-based shallow phrase chunker.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("train", help="train a model bundle")
    _add_shared(p)
    p.add_argument("train_file")
    p.add_argument("model_out")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("tune", help="tune open-close thresholds on a 90/10 split, then retrain")
    _add_shared(p)
    p.add_argument("train_file")
    p.add_argument("model_out")
    p.set_defaults(func=cmd_tune)

    p = sub.add_parser("predict", help="label a corpus with a trained model")
    _add_shared(p)
    p.add_argument("model")
    p.add_argument("input_file")
    p.add_argument("output_file")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("eval", help="score predictions against gold chunks")
    p.add_argument("gold_file")
    p.add_argument("pred_file")
    p.add_argument("--method", choices=METHODS, help="which word-level accuracies to report")
    p.add_argument("--breakdown", action="store_true", help="add the phrase-length breakdown")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("synth", help="generate a seeded synthetic corpus")
    p.add_argument("out_file")
    p.add_argument("-n", type=int, default=5000)
    p.add_argument("--pattern", default=DEFAULT_PATTERN,
                   help="tag pattern such as 'DT JJ* NN', or 'distance'")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_synth)
    return parser


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:
        return e.code
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args, out)
    except UsageError as e:
        print(f"snowchunk: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (CorpusFormatError, UnicodeDecodeError) as e:
        print(f"snowchunk: data format error: {e}", file=sys.stderr)
        return EXIT_DATA
    except ModelFormatError as e:
        print(f"snowchunk: model format error: {e}", file=sys.stderr)
        return EXIT_MODEL
    except OSError as e:
        print(f"snowchunk: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
