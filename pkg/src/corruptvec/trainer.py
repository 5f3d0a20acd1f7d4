"""Epoch-driven SGD over a corpus file with optional lock-free workers.

Workers shard documents by index and update the shared parameter matrices
without locks; colliding column updates may be lost, which the model
tolerates. Determinism is guaranteed only at workers=1, where the compiled
loop consumes rng draws in a pinned order that the plain-Python twin in
``reference`` reproduces bitwise.
"""

from __future__ import annotations

import os
import threading
import time
from dataclasses import dataclass, field

import numpy as np

from . import _kernels, rng as _rng
from .corpus import Vocabulary, build_vocab, encode_corpus, iter_tokens
from .errors import (CorpusError, NonFiniteComputation, ParameterError,
                     TrainingDiverged)
from .model import ModelParams, NegSampleTable, init_params

LR_FLOOR = 1e-4


def _default_workers() -> int:
    env = os.environ.get("CORRUPTVEC_THREADS")
    if env:
        return int(env)
    return os.cpu_count() or 1


@dataclass
class TrainConfig:
    dim: int = 100
    window: int = 5
    corruption: float = 0.9
    negatives: int = 5
    subsample: float = 1e-4
    learning_rate: float = 0.05
    epochs: int = 10
    min_count: int = 10
    workers: int = field(default_factory=_default_workers)
    seed: int = 1
    neg_power: float = 0.0
    global_context: bool = True
    combiner: str = "sum"
    resample_per_position: bool = False
    fast_sigmoid: bool = False
    dtype: str = "float32"

    def __post_init__(self):
        if self.dim < 1:
            raise ParameterError(f"dim must be >= 1, got {self.dim}")
        if self.window < 1:
            raise ParameterError(f"window must be >= 1, got {self.window}")
        if not 0.0 <= self.corruption < 1.0:
            raise ParameterError(
                f"corruption rate must satisfy 0 <= q < 1, got {self.corruption}")
        if self.negatives < 0:
            raise ParameterError(f"negatives must be >= 0, got {self.negatives}")
        if self.subsample < 0:
            raise ParameterError(f"subsample threshold must be >= 0, got {self.subsample}")
        if self.learning_rate <= 0:
            raise ParameterError(f"learning rate must be > 0, got {self.learning_rate}")
        if self.epochs < 1:
            raise ParameterError(f"epochs must be >= 1, got {self.epochs}")
        if self.min_count < 1:
            raise ParameterError(f"min_count must be >= 1, got {self.min_count}")
        if self.workers < 1:
            raise ParameterError(f"workers must be >= 1, got {self.workers}")
        if self.neg_power < 0:
            raise ParameterError(f"neg_power must be >= 0, got {self.neg_power}")
        if self.combiner not in ("sum", "mean"):
            raise ParameterError(f"combiner must be 'sum' or 'mean', got {self.combiner!r}")
        if self.dtype not in ("float32", "float64"):
            raise ParameterError(f"dtype must be 'float32' or 'float64', got {self.dtype!r}")

    @property
    def np_dtype(self):
        return np.float32 if self.dtype == "float32" else np.float64


@dataclass
class TrainReport:
    positions: int
    epoch_loss: list[float]
    epoch_seconds: list[float]
    words_per_sec: float

    def to_dict(self) -> dict:
        return {
            "positions": self.positions,
            "epoch_loss": self.epoch_loss,
            "epoch_seconds": self.epoch_seconds,
            "words_per_sec": self.words_per_sec,
        }


def lr_schedule(lr0: float, progress: float) -> float:
    """Linear decay over training progress, floored at 1e-4 of the base rate."""
    if not 0.0 <= progress <= 1.0:
        raise ParameterError(f"progress must lie in [0, 1], got {progress}")
    return lr0 * max(1.0 - progress, LR_FLOOR)


def train(corpus_path, config: TrainConfig):
    """Run the full pipeline: vocab, encode, SGD epochs. Returns
    (ModelParams, Vocabulary, TrainReport)."""
    vocab = build_vocab(iter_tokens(corpus_path), config.min_count)
    tokens, offsets, lengths = encode_corpus(corpus_path, vocab)
    params = init_params(len(vocab), config.dim, config.seed, config.np_dtype)
    report = train_encoded(params, vocab, tokens, offsets, lengths, config)
    return params, vocab, report


def train_encoded(params: ModelParams, vocab: Vocabulary, tokens: np.ndarray,
                  offsets: np.ndarray, lengths: np.ndarray,
                  config: TrainConfig) -> TrainReport:
    """SGD epochs over pre-encoded documents, updating ``params`` in place."""
    total_tokens = int(lengths.sum())
    if total_tokens == 0:
        raise CorpusError("corpus contains no in-vocabulary tokens")
    discard = vocab.discard_probs(config.subsample)
    neg_table = NegSampleTable.build(vocab.counts, config.neg_power).table
    sig_table = (_kernels.make_sigmoid_table() if config.fast_sigmoid
                 else np.empty(0, dtype=np.float64))
    budget = float(config.epochs) * float(total_tokens)
    counter = np.zeros(1, dtype=np.int64)
    max_len = int(lengths.max())
    n_workers = config.workers
    state_cells = [
        np.array([_rng.stream_state(config.seed, _rng.WORKER_STREAM_BASE + w)],
                 dtype=np.uint64)
        for w in range(n_workers)
    ]

    epoch_loss: list[float] = []
    epoch_seconds: list[float] = []
    total_positions = 0
    for epoch in range(config.epochs):
        outs = [np.zeros(3, dtype=np.float64) for _ in range(n_workers)]
        t0 = time.perf_counter()
        if n_workers == 1:
            _run_shard(params, tokens, offsets, lengths, discard, neg_table,
                       config, budget, counter, state_cells[0], 0, 1, max_len,
                       sig_table, outs[0])
        else:
            threads = [
                threading.Thread(
                    target=_run_shard,
                    args=(params, tokens, offsets, lengths, discard, neg_table,
                          config, budget, counter, state_cells[w], w,
                          n_workers, max_len, sig_table, outs[w]),
                )
                for w in range(n_workers)
            ]
            for t in threads:
                t.start()
            for t in threads:
                t.join()
        epoch_seconds.append(time.perf_counter() - t0)

        for w, out in enumerate(outs):
            if out[2] >= 0:
                raise TrainingDiverged(
                    "non-finite loss", doc_index=int(out[2]), epoch=epoch)
        loss_sum = sum(float(out[0]) for out in outs)
        positions = sum(int(out[1]) for out in outs)
        total_positions += positions
        epoch_loss.append(loss_sum / positions if positions else float("nan"))
        try:
            params.check_finite()
        except NonFiniteComputation as err:
            raise TrainingDiverged(str(err), epoch=epoch) from err

    if total_positions == 0:
        raise CorpusError("no trainable positions (every document shorter than 2 tokens)")
    wps = total_positions / sum(epoch_seconds) if sum(epoch_seconds) > 0 else float("inf")
    return TrainReport(total_positions, epoch_loss, epoch_seconds, wps)


def _run_shard(params, tokens, offsets, lengths, discard, neg_table, config,
               budget, counter, state_cell, worker, n_workers, max_len,
               sig_table, out):
    _kernels.train_shard(
        params.input_vectors, params.output_vectors, tokens, offsets, lengths,
        discard, neg_table, config.window, config.negatives, config.corruption,
        config.global_context, config.resample_per_position,
        config.combiner == "mean", config.learning_rate, budget, counter,
        state_cell, worker, n_workers, max_len, sig_table, out)
