"""Command-line frontend.

Exit codes: 0 success, 1 usage error (bad flags/ranges, usage on stderr),
2 runtime failure (I/O, parse errors, divergence). Reports are JSON on
stdout; progress and warnings go to stderr so outputs stay pipeable.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import corpus as _corpus
from . import diagnostics as _diag
from . import evaluation as _eval
from . import inference as _inf
from .errors import CorruptvecError, ParameterError
from .model import ModelParams, init_params
from .trainer import TrainConfig, train


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise _UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="corruptvec",
                     description="Document embeddings by averaging word vectors "
                                 "trained against a corrupted whole-document context.")
    sub = parser.add_subparsers(dest="command", required=True)
    fmt = argparse.ArgumentDefaultsHelpFormatter

    p = sub.add_parser("train", help="train word vectors on a corpus",
                       formatter_class=fmt)
    p.add_argument("--input", required=True, help="corpus file, one document per line")
    p.add_argument("--output-words", help="write word (input) vectors here")
    p.add_argument("--output-context", help="write context (output) vectors here")
    p.add_argument("--save-vocab", help="write the vocabulary as word<TAB>count")
    p.add_argument("--size", type=int, default=100, help="embedding dimension")
    p.add_argument("--window", type=int, default=5, help="max half-window")
    p.add_argument("--negative", type=int, default=5, help="negative samples per position")
    p.add_argument("--sample", type=float, default=1e-4,
                   help="frequent-word subsampling threshold, 0 disables")
    p.add_argument("--min-count", type=int, default=10, help="vocabulary cutoff")
    p.add_argument("--corruption", type=float, default=None,
                   help="document corruption rate q in [0,1) (default 0.9)")
    p.add_argument("--no-global-context", action="store_true",
                   help="disable the document term (plain CBoW baseline)")
    p.add_argument("--combiner", choices=["sum", "mean"], default="sum",
                   help="how the window combines into the hidden vector")
    p.add_argument("--lr", type=float, default=0.05, help="initial learning rate")
    p.add_argument("--epochs", type=int, default=10, help="training epochs")
    p.add_argument("--threads", type=int, default=None,
                   help="worker threads (default: CORRUPTVEC_THREADS or all cores)")
    p.add_argument("--seed", type=int, default=1, help="rng seed")
    p.add_argument("--neg-power", type=float, default=0.0,
                   help="negative-sampling distribution power (0 = uniform)")
    p.add_argument("--resample-per-position", action="store_true",
                   help="redraw the corruption at every target position")
    p.add_argument("--fast-sigmoid", action="store_true",
                   help="use a 1024-bin sigmoid table instead of exact exp")
    p.add_argument("--dtype", choices=["float32", "float64"], default="float32",
                   help="parameter storage precision")
    p.add_argument("--binary", action="store_true", help="write vectors in binary format")
    p.add_argument("--report", action="store_true", help="print a JSON training report")
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("embed", help="write one document vector per corpus line",
                       formatter_class=fmt)
    p.add_argument("--model", required=True, help="word-vector file (text or binary)")
    p.add_argument("--input", required=True, help="corpus file to embed")
    p.add_argument("--output", required=True, help="output file of vector rows")
    p.set_defaults(func=_cmd_embed)

    p = sub.add_parser("analogy", help="word-analogy accuracy report",
                       formatter_class=fmt)
    p.add_argument("--model", required=True)
    p.add_argument("--questions", required=True,
                   help="': category' sections of 4-token lines")
    p.add_argument("--restrict", type=int, default=30000,
                   help="candidate pool = this many most frequent words")
    p.set_defaults(func=_cmd_analogy)

    p = sub.add_parser("nn", help="nearest neighbors of a word", formatter_class=fmt)
    p.add_argument("--model", required=True)
    p.add_argument("--word", required=True)
    p.add_argument("--top", type=int, default=10)
    p.set_defaults(func=_cmd_nn)

    p = sub.add_parser("norms", help="lowest-norm words with counts",
                       formatter_class=fmt)
    p.add_argument("--model", required=True)
    p.add_argument("--vocab", required=True, help="word<TAB>count file for counts")
    p.add_argument("--bottom", type=int, default=30)
    p.set_defaults(func=_cmd_norms)

    p = sub.add_parser("classify", help="fit/evaluate the linear probe",
                       formatter_class=fmt)
    p.add_argument("--features", required=True, help="rows of space-separated floats")
    p.add_argument("--labels", required=True, help="one integer label per row")
    p.add_argument("--l2", type=float, default=0.0)
    p.add_argument("--test-features")
    p.add_argument("--test-labels")
    p.set_defaults(func=_cmd_classify)

    p = sub.add_parser("diag", help="regularizer report on a corpus sample",
                       formatter_class=fmt)
    p.add_argument("--input", required=True, help="corpus file")
    p.add_argument("--size", type=int, default=20, help="embedding dimension")
    p.add_argument("--corruption", type=float, default=0.9)
    p.add_argument("--window", type=int, default=5)
    p.add_argument("--negative", type=int, default=5)
    p.add_argument("--min-count", type=int, default=1)
    p.add_argument("--max-docs", type=int, default=200,
                   help="cap on documents read from the corpus")
    p.add_argument("--seed", type=int, default=1)
    p.set_defaults(func=_cmd_diag)
    return parser


def config_from_flags(args) -> TrainConfig:
    """Translate parsed flags into a TrainConfig, catching conflicts."""
    if args.no_global_context and args.corruption is not None:
        raise ParameterError(
            "--corruption has no effect with --no-global-context; drop one")
    corruption = 0.9 if args.corruption is None else args.corruption
    workers = args.threads
    if workers is None:
        env = os.environ.get("CORRUPTVEC_THREADS")
        workers = int(env) if env else (os.cpu_count() or 1)
    return TrainConfig(
        dim=args.size, window=args.window, corruption=corruption,
        negatives=args.negative, subsample=args.sample, learning_rate=args.lr,
        epochs=args.epochs, min_count=args.min_count, workers=workers,
        seed=args.seed, neg_power=args.neg_power,
        global_context=not args.no_global_context, combiner=args.combiner,
        resample_per_position=args.resample_per_position,
        fast_sigmoid=args.fast_sigmoid, dtype=args.dtype)


def _cmd_train(args) -> int:
    try:
        config = config_from_flags(args)
    except ParameterError as err:
        raise _UsageError(str(err))
    print(f"training on {args.input}", file=sys.stderr)
    params, vocab, report = train(args.input, config)
    print(f"vocabulary {len(vocab)} words, {report.positions} positions processed",
          file=sys.stderr)
    if args.output_words:
        _inf.save_word_vectors(params, vocab, args.output_words, binary=args.binary)
    if args.output_context:
        _inf.save_word_vectors(params, vocab, args.output_context,
                               binary=args.binary, which="output")
    if args.save_vocab:
        _corpus.save_vocab(vocab, args.save_vocab)
    if args.report:
        print(json.dumps(report.to_dict(), indent=2))
    return 0


def _load_model(path) -> tuple[ModelParams, _corpus.Vocabulary]:
    mat, words = _inf.load_word_vectors(path)
    # vector files carry no counts; order stands in for frequency rank
    counts = np.arange(len(words), 0, -1, dtype=np.int64)
    vocab = _corpus.Vocabulary(words, counts, int(counts.sum()), 1)
    params = ModelParams(mat, np.zeros_like(mat))
    return params, vocab


def _cmd_embed(args) -> int:
    params, vocab = _load_model(args.model)
    count = _inf.embed_corpus(params, vocab, args.input, args.output)
    print(f"embedded {count} documents", file=sys.stderr)
    return 0


def _cmd_analogy(args) -> int:
    params, vocab = _load_model(args.model)
    questions = _eval.load_analogy_questions(args.questions)
    report = _eval.analogy_eval(params, vocab, questions, restrict_top=args.restrict)
    print(json.dumps(report.to_dict(), indent=2))
    return 0


def _cmd_nn(args) -> int:
    params, vocab = _load_model(args.model)
    pairs = _eval.nearest_neighbors(params, vocab, args.word, args.top)
    print(json.dumps({"word": args.word,
                      "neighbors": [{"word": w, "cosine": c} for w, c in pairs]},
                     indent=2))
    return 0


def _cmd_norms(args) -> int:
    params, loaded_vocab = _load_model(args.model)
    vocab = _corpus.load_vocab(args.vocab)
    if vocab.words != loaded_vocab.words:
        raise CorruptvecError("vocabulary file does not match the model's words")
    rows = _eval.norm_report(params, vocab, args.bottom)
    print(json.dumps({"words": [{"word": w, "norm": n, "count": c}
                                for w, n, c in rows]}, indent=2))
    return 0


def _read_matrix(path) -> np.ndarray:
    rows = np.loadtxt(path, dtype=np.float64, ndmin=2)
    return rows


def _cmd_classify(args) -> int:
    x = _read_matrix(args.features)
    y = np.loadtxt(args.labels, dtype=np.int64, ndmin=1)
    clf = _eval.fit_linear(x, y, l2=args.l2)
    train_acc = float((_eval.classify(clf, x) == y).mean())
    out = {"classes": clf.classes.tolist(), "train_accuracy": train_acc}
    if args.test_features and args.test_labels:
        xt = _read_matrix(args.test_features)
        yt = np.loadtxt(args.test_labels, dtype=np.int64, ndmin=1)
        out["test_accuracy"] = float((_eval.classify(clf, xt) == yt).mean())
        out["test_error"] = 1.0 - out["test_accuracy"]
    print(json.dumps(out, indent=2))
    return 0


def _cmd_diag(args) -> int:
    vocab = _corpus.build_vocab(_corpus.iter_tokens(args.input), args.min_count)
    docs = []
    for line in _corpus.iter_lines(args.input):
        doc = _corpus.encode(line, vocab)
        if len(doc.tokens) > 0:
            docs.append(doc)
        if len(docs) >= args.max_docs:
            break
    params = init_params(len(vocab), args.size, args.seed, np.float64,
                         randomize_output=True)
    report = _diag.regularizer_report(params, docs, args.corruption,
                                      window=args.window,
                                      negatives=args.negative, seed=args.seed,
                                      counts=vocab.counts)
    rho, pvalue = _diag.reg_frequency_correlation(report, vocab)
    out = report.to_dict(vocab)
    out["spearman_rho"] = rho
    out["p_value"] = pvalue
    print(json.dumps(out, indent=2))
    return 0


def run(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else int(exc.code)
    try:
        return args.func(args)
    except _UsageError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    except (CorruptvecError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
