#!/usr/bin/env python3
"""Measure training throughput (words/sec) across worker counts.

Uses a synthetic Zipf corpus so the benchmark needs no downloads. The first
timed run includes kernel compilation unless a warmup already happened, so a
warmup pass runs by default.
"""
import argparse
import sys
import tempfile
import time
from pathlib import Path

import numpy as np

from corruptvec.trainer import TrainConfig, train


def synth_corpus(path: Path, n_docs: int, vocab: int, doc_len: int, seed: int):
    rs = np.random.RandomState(seed)
    weights = 1.0 / np.arange(1, vocab + 1) ** 1.05
    weights /= weights.sum()
    with open(path, "w") as fh:
        for _ in range(n_docs):
            ids = rs.choice(vocab, size=doc_len, p=weights)
            fh.write(" ".join(f"w{i}" for i in ids) + "\n")


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--docs", type=int, default=2000)
    ap.add_argument("--doc-len", type=int, default=200)
    ap.add_argument("--vocab", type=int, default=5000)
    ap.add_argument("--dim", type=int, default=100)
    ap.add_argument("--epochs", type=int, default=2)
    ap.add_argument("--workers", type=int, nargs="+", default=[1, 2, 4])
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--no-warmup", action="store_true")
    args = ap.parse_args()

    with tempfile.TemporaryDirectory() as tmp:
        corpus = Path(tmp) / "bench.txt"
        synth_corpus(corpus, args.docs, args.vocab, args.doc_len, args.seed)
        total = args.docs * args.doc_len

        def run(workers, epochs):
            config = TrainConfig(dim=args.dim, epochs=epochs, min_count=1,
                                 workers=workers, seed=args.seed)
            t0 = time.time()
            _, _, report = train(corpus, config)
            return time.time() - t0, report

        if not args.no_warmup:
            run(1, 1)

        print(f"corpus: {args.docs} docs x {args.doc_len} tokens "
              f"({total} words), dim={args.dim}, epochs={args.epochs}")
        base = None
        for w in args.workers:
            elapsed, report = run(w, args.epochs)
            rate = report.words_per_sec
            base = base or elapsed
            print(f"workers={w:2d}  {elapsed:6.2f}s  {rate:12,.0f} words/s  "
                  f"speedup x{base / elapsed:.2f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
