"""Parameters and the per-instance math: scores, loss, analytic gradients.

Embeddings live in two (v, h) row-major matrices: ``input_vectors`` (the word
embeddings that documents average over) and ``output_vectors`` (the scoring
side of negative sampling). The trainer's compiled loops duplicate this math;
everything here is the readable, testable form used by diagnostics and tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import rng as _rng
from .corruption import CorruptedContext
from .errors import NonFiniteComputation, ParameterError

SIGMOID_CLAMP = 30.0

# negative-sampling table size; word2vec lineage uses 1e8, this is plenty
# for desk-scale vocabularies
NEG_TABLE_SIZE = 1_000_000


@dataclass
class ModelParams:
    """Input (word) and output (scoring) embedding matrices, both (v, h)."""

    input_vectors: np.ndarray
    output_vectors: np.ndarray

    @property
    def vocab_size(self) -> int:
        return self.input_vectors.shape[0]

    @property
    def dim(self) -> int:
        return self.input_vectors.shape[1]

    def check_finite(self) -> None:
        if not np.isfinite(self.input_vectors).all():
            raise NonFiniteComputation("non-finite entries in input vectors")
        if not np.isfinite(self.output_vectors).all():
            raise NonFiniteComputation("non-finite entries in output vectors")


@dataclass
class TrainingInstance:
    """One prediction task: a target, its window, and the document context.

    ``global_context`` is None when running the plain-CBoW baseline.
    ``doc_length`` is the pre-subsampling in-vocabulary length T that scales
    the global term.
    """

    target: int
    context: Sequence[int]
    global_context: CorruptedContext | None
    doc_length: int


def init_params(vocab_size: int, dim: int, seed: int, dtype=np.float32,
                randomize_output: bool = False) -> ModelParams:
    """Input vectors uniform in (-0.5/h, 0.5/h), output vectors zero.

    Zero output vectors make every initial logit zero, so the first loss
    evaluations sit exactly at (k+1)*log 2. Draws come from the init stream
    of the seeded generator, row-major, one per entry; the layout is part of
    the reproducibility contract. ``randomize_output`` draws the output
    matrix the same way (continuing the stream) for diagnostics that need
    nonzero logits without training.
    """
    if vocab_size < 1 or dim < 1:
        raise ParameterError(f"need vocab_size >= 1 and dim >= 1, got {vocab_size}, {dim}")
    gen = _rng.Rng(seed, stream=_rng.INIT_STREAM)
    flat = gen.uniforms(vocab_size * dim)
    u = ((flat - 0.5) / dim).reshape(vocab_size, dim).astype(dtype)
    if randomize_output:
        flat_v = gen.uniforms(vocab_size * dim)
        v = ((flat_v - 0.5) / dim).reshape(vocab_size, dim).astype(dtype)
    else:
        v = np.zeros((vocab_size, dim), dtype=dtype)
    return ModelParams(u, v)


def sigmoid(x: float) -> float:
    """Logistic function, input clamped to [-30, 30] so logs stay finite."""
    if x > SIGMOID_CLAMP:
        x = SIGMOID_CLAMP
    elif x < -SIGMOID_CLAMP:
        x = -SIGMOID_CLAMP
    return 1.0 / (1.0 + math.exp(-x))


def hidden_vector(params: ModelParams, instance: TrainingInstance,
                  combiner: str = "sum") -> np.ndarray:
    """Local window term plus the 1/T-scaled corrupted whole-document term.

    z = sum_c u_c  (+ scale/T * sum_survivors u_w when a global context is
    present). ``combiner="mean"`` divides the local term by the window size.
    """
    if combiner not in ("sum", "mean"):
        raise ParameterError(f"combiner must be 'sum' or 'mean', got {combiner!r}")
    gc = instance.global_context
    if len(instance.context) == 0 and (gc is None or len(gc) == 0):
        raise ParameterError("degenerate instance: empty context and empty global context")
    z = np.zeros(params.dim, dtype=np.float64)
    for c in instance.context:
        z += params.input_vectors[c]
    if combiner == "mean" and len(instance.context) > 0:
        z /= len(instance.context)
    if gc is not None and len(gc) > 0:
        coef = gc.scale / instance.doc_length
        g = np.zeros(params.dim, dtype=np.float64)
        for w in gc.surviving_tokens:
            g += params.input_vectors[w]
        z += coef * g
    return z


def nll_and_grads(params: ModelParams, instance: TrainingInstance,
                  negatives: Sequence[int], combiner: str = "sum"):
    """Negative-sampling loss and sparse gradients for one instance.

    Returns (loss, input_grads, output_grads) where the grad maps take a
    word id to the float64 gradient on that embedding row. Repeated words
    (window duplicates, global multiplicity) accumulate into one entry.
    """
    z = hidden_vector(params, instance, combiner)
    dz = np.zeros(params.dim, dtype=np.float64)
    output_grads: dict[int, np.ndarray] = {}
    loss = 0.0
    for w, label in [(instance.target, 1.0)] + [(int(n), 0.0) for n in negatives]:
        logit = float(params.output_vectors[w].astype(np.float64) @ z)
        p = sigmoid(logit)
        loss += -math.log(p) if label == 1.0 else -math.log(1.0 - p)
        err = p - label
        dz += err * params.output_vectors[w].astype(np.float64)
        g = output_grads.setdefault(w, np.zeros(params.dim, dtype=np.float64))
        g += err * z
    if not math.isfinite(loss):
        raise NonFiniteComputation("non-finite loss", instance=instance)

    input_grads: dict[int, np.ndarray] = {}
    ctx_weight = 1.0
    if combiner == "mean" and len(instance.context) > 0:
        ctx_weight = 1.0 / len(instance.context)
    for c in instance.context:
        g = input_grads.setdefault(int(c), np.zeros(params.dim, dtype=np.float64))
        g += ctx_weight * dz
    gc = instance.global_context
    if gc is not None and len(gc) > 0:
        coef = gc.scale / instance.doc_length
        for w in gc.surviving_tokens:
            g = input_grads.setdefault(int(w), np.zeros(params.dim, dtype=np.float64))
            g += coef * dz
    return loss, input_grads, output_grads


@dataclass
class NegSampleTable:
    """Sampling distribution over word ids: uniform, or count^alpha via a table.

    alpha=0 keeps no table and draws ids uniformly. alpha>0 materializes a
    slot table where word w owns a share of slots proportional to
    count_w^alpha, with every word guaranteed at least one slot.
    """

    vocab_size: int
    alpha: float
    table: np.ndarray

    @classmethod
    def build(cls, counts: np.ndarray, alpha: float = 0.0,
              table_size: int = NEG_TABLE_SIZE) -> "NegSampleTable":
        v = len(counts)
        if v < 1:
            raise ParameterError("cannot build a sampling table over an empty vocabulary")
        if alpha < 0:
            raise ParameterError(f"neg_power must be >= 0, got {alpha}")
        if alpha == 0.0:
            return cls(v, 0.0, np.empty(0, dtype=np.int32))
        if table_size < v:
            raise ParameterError(f"table_size {table_size} smaller than vocabulary {v}")
        weights = counts.astype(np.float64) ** alpha
        ideal = weights / weights.sum() * table_size
        slots = np.maximum(1, np.floor(ideal).astype(np.int64))
        # largest-remainder top-up / trim to hit table_size exactly while
        # keeping every word's floor of one slot
        excess = int(slots.sum()) - table_size
        if excess < 0:
            order = np.argsort(-(ideal - np.floor(ideal)), kind="stable")
            slots[order[:-excess]] += 1
        elif excess > 0:
            order = np.argsort(-slots, kind="stable")
            i = 0
            while excess > 0:
                w = order[i % v]
                if slots[w] > 1:
                    slots[w] -= 1
                    excess -= 1
                i += 1
        table = np.repeat(np.arange(v, dtype=np.int32), slots)
        return cls(v, alpha, table)

    def draw(self, rng) -> int:
        if len(self.table) > 0:
            return int(self.table[rng.randint(len(self.table))])
        return rng.randint(self.vocab_size)


def draw_negatives(table: NegSampleTable, k: int, rng, exclude: int) -> list[int]:
    """k independent draws; draws equal to ``exclude`` are rejected and redrawn."""
    if k < 0:
        raise ParameterError(f"negative count must be >= 0, got {k}")
    if k > 0 and table.vocab_size < 2:
        raise ParameterError("need a vocabulary of >= 2 words to draw negatives")
    out = []
    while len(out) < k:
        w = table.draw(rng)
        if w != exclude:
            out.append(w)
    return out
