#!/usr/bin/env python3
"""Full text8 comparison: corrupted-document training vs the plain CBoW
baseline, reporting embedding-norm structure and word-analogy accuracy.

Prereqs: scripts/fetch_text8.py and scripts/fetch_questions.py.
Expect ~20-40 min per model on a desktop CPU with default settings.
"""
import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from corruptvec.evaluation import analogy_eval, load_analogy_questions
from corruptvec.trainer import TrainConfig, train

DATA = Path(__file__).resolve().parent.parent / "data"


def norm_summary(params, vocab, top=200, bottom=30):
    norms = np.linalg.norm(params.input_vectors.astype(np.float64), axis=1)
    lowest = np.argsort(norms, kind="stable")[:bottom]
    return {
        "mean_norm": float(norms.mean()),
        "top20_mean_norm": float(norms[:20].mean()),
        "lowest_norm_words": [vocab.words[i] for i in lowest],
        "frequent_in_lowest": int(np.sum(lowest < top)),
    }


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--corpus", type=Path, default=DATA / "text8.txt")
    ap.add_argument("--questions", type=Path, default=DATA / "questions-words.txt")
    ap.add_argument("--dim", type=int, default=100)
    ap.add_argument("--epochs", type=int, default=5)
    ap.add_argument("--min-count", type=int, default=100)
    ap.add_argument("--corruption", type=float, default=0.9)
    ap.add_argument("--threads", type=int, default=None)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--json", type=Path, help="also dump the report here")
    args = ap.parse_args()

    for path in (args.corpus, args.questions):
        if not path.exists():
            print(f"missing {path}; run the matching scripts/fetch_*.py first",
                  file=sys.stderr)
            return 1

    base = dict(dim=args.dim, epochs=args.epochs, min_count=args.min_count,
                seed=args.seed)
    if args.threads:
        base["workers"] = args.threads
    questions = load_analogy_questions(args.questions)
    out = {}
    for name, config in [
        ("corrupted", TrainConfig(corruption=args.corruption, **base)),
        ("cbow", TrainConfig(global_context=False, **base)),
    ]:
        t0 = time.time()
        print(f"training {name} ...", file=sys.stderr)
        params, vocab, report = train(args.corpus, config)
        analogy = analogy_eval(params, vocab, questions)
        out[name] = {
            "minutes": round((time.time() - t0) / 60, 1),
            "words_per_sec": round(report.words_per_sec),
            "norms": norm_summary(params, vocab),
            "analogy": analogy.to_dict(),
        }
        print(f"{name}: overall analogy accuracy "
              f"{analogy.overall_accuracy:.4f}", file=sys.stderr)

    wins = sum(
        out["corrupted"]["analogy"]["categories"][cat]["accuracy"]
        > out["cbow"]["analogy"]["categories"][cat]["accuracy"]
        for cat in out["corrupted"]["analogy"]["categories"])
    out["subtask_wins"] = wins
    text = json.dumps(out, indent=2)
    print(text)
    if args.json:
        args.json.write_text(text)
    # low-norm structure should appear only with the document term on
    print(f"\nfrequent words among the 30 lowest norms: "
          f"corrupted={out['corrupted']['norms']['frequent_in_lowest']} "
          f"cbow={out['cbow']['norms']['frequent_in_lowest']}", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
