#!/usr/bin/env python3
"""IMDB sentiment pipeline: representations from unlabeled text, then a
linear probe on the labeled split.

Prereq: scripts/fetch_imdb.py. Expect ~30 min on a desktop CPU.
"""
import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from corruptvec.corpus import encode, iter_lines
from corruptvec.evaluation import classify, fit_linear
from corruptvec.inference import embed_document
from corruptvec.trainer import TrainConfig, train

DATA = Path(__file__).resolve().parent.parent / "data"


def embed_file(params, vocab, path, dim):
    rows = []
    for line in iter_lines(path):
        doc = encode(line, vocab)
        if len(doc.tokens) == 0:
            rows.append(np.zeros(dim))
        else:
            rows.append(embed_document(params, doc).values)
    return np.array(rows)


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--data", type=Path, default=DATA)
    ap.add_argument("--dim", type=int, default=100)
    ap.add_argument("--epochs", type=int, default=5)
    ap.add_argument("--corruption", type=float, default=0.9)
    ap.add_argument("--l2", type=float, default=1e-4)
    ap.add_argument("--threads", type=int, default=None)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()

    needed = ["imdb_train_unsup.txt", "imdb_train.txt", "imdb_train_labels.txt",
              "imdb_test.txt", "imdb_test_labels.txt"]
    for name in needed:
        if not (args.data / name).exists():
            print(f"missing {args.data / name}; run scripts/fetch_imdb.py first",
                  file=sys.stderr)
            return 1

    config = TrainConfig(dim=args.dim, corruption=args.corruption,
                         epochs=args.epochs, min_count=10, seed=args.seed,
                         **({"workers": args.threads} if args.threads else {}))
    t0 = time.time()
    print("learning representations on train+unlabeled ...", file=sys.stderr)
    params, vocab, report = train(args.data / "imdb_train_unsup.txt", config)
    train_min = (time.time() - t0) / 60

    x_train = embed_file(params, vocab, args.data / "imdb_train.txt", args.dim)
    y_train = np.loadtxt(args.data / "imdb_train_labels.txt", dtype=np.int64)
    x_test = embed_file(params, vocab, args.data / "imdb_test.txt", args.dim)
    y_test = np.loadtxt(args.data / "imdb_test_labels.txt", dtype=np.int64)

    print("fitting the linear probe ...", file=sys.stderr)
    clf = fit_linear(x_train, y_train, l2=args.l2)
    out = {
        "train_minutes": round(train_min, 1),
        "words_per_sec": round(report.words_per_sec),
        "vocab": len(vocab),
        "train_error": float((classify(clf, x_train) != y_train).mean()),
        "test_error": float((classify(clf, x_test) != y_test).mean()),
    }
    print(json.dumps(out, indent=2))
    return 0


if __name__ == "__main__":
    sys.exit(main())
