"""Slow, transparent reimplementation of the training loop.

This module exists to pin down the trainer's exact semantics: it follows the
same draw order, the same float64 arithmetic with dtype-rounded stores, and
the same shared-rng protocol as the compiled loop, but in plain Python with
its own integer LCG. At workers=1 the two produce bit-identical parameters,
which is what the equivalence tests assert. Deliberately duplicates protocol
constants instead of importing them, so a regression in either side surfaces
as a mismatch.
"""

from __future__ import annotations

import math

import numpy as np

from .model import NegSampleTable
from .trainer import TrainConfig

_MASK = (1 << 64) - 1
_MULT = 6364136223846793005
_ADD = 1442695040888963407
_GOLDEN = 0x9E3779B97F4A7C15

_SIG_CLAMP = 30.0
_SIG_BINS = 1024
_SIG_MAX = 6.0
_LR_FLOOR = 1e-4


def _mix(x: int) -> int:
    x &= _MASK
    x ^= x >> 30
    x = (x * 0xBF58476D1CE4E5B9) & _MASK
    x ^= x >> 27
    x = (x * 0x94D049BB133111EB) & _MASK
    x ^= x >> 31
    return x


class _Lcg:
    def __init__(self, seed: int, stream: int):
        self.state = _mix((seed + _GOLDEN * (stream + 1)) & _MASK)

    def uniform(self) -> float:
        self.state = (self.state * _MULT + _ADD) & _MASK
        return (self.state >> 11) * 2.0**-53

    def randint(self, n: int) -> int:
        return int(self.uniform() * n)


def _sigmoid(f: float, sig_table) -> float:
    if f > _SIG_CLAMP:
        f = _SIG_CLAMP
    elif f < -_SIG_CLAMP:
        f = -_SIG_CLAMP
    if sig_table is not None:
        if f >= _SIG_MAX:
            return sig_table[-1]
        if f <= -_SIG_MAX:
            return sig_table[0]
        return sig_table[int((f + _SIG_MAX) / (2 * _SIG_MAX) * _SIG_BINS)]
    return 1.0 / (1.0 + math.exp(-f))


def init_reference(vocab_size: int, dim: int, seed: int, dtype) -> np.ndarray:
    """Input-matrix init from the shared protocol: stream 0, row-major,
    entry = (u - 0.5)/dim."""
    gen = _Lcg(seed, 0)
    u = np.empty((vocab_size, dim), dtype=dtype)
    for w in range(vocab_size):
        for j in range(dim):
            u[w, j] = (gen.uniform() - 0.5) / dim
    return u


def train_reference(tokens, offsets, lengths, counts, config: TrainConfig):
    """Single-worker training loop, plain Python. Returns (U, V, positions).

    Matches the compiled trainer draw for draw and store for store. Supports
    every TrainConfig knob except workers > 1.
    """
    if config.workers != 1:
        raise ValueError("reference loop is single-worker only")
    dtype = config.np_dtype
    vocab_size = len(counts)
    u_mat = init_reference(vocab_size, config.dim, config.seed, dtype)
    v_mat = np.zeros((vocab_size, config.dim), dtype=dtype)

    total = int(lengths.sum())
    discard = None
    if config.subsample > 0:
        discard = [
            max(0.0, 1.0 - math.sqrt(config.subsample / (int(c) / total)))
            for c in counts
        ]
    neg_table = NegSampleTable.build(np.asarray(counts), config.neg_power).table
    sig_table = None
    if config.fast_sigmoid:
        xs = (np.arange(_SIG_BINS) + 0.5) / _SIG_BINS * (2 * _SIG_MAX) - _SIG_MAX
        sig_table = [float(s) for s in 1.0 / (1.0 + np.exp(-xs))]

    gen = _Lcg(config.seed, 1)
    dim = config.dim
    window = config.window
    n_neg = config.negatives
    q = config.corruption
    lr0 = config.learning_rate
    scale = 1.0 / (1.0 - q)
    budget = float(config.epochs) * float(total)
    use_global = config.global_context
    resample = config.resample_per_position
    mean_combiner = config.combiner == "mean"

    counter = 0
    positions = 0
    n_docs = len(offsets) - 1

    def corrupt_once(kept):
        return [w for w in kept if gen.uniform() >= q]

    def global_vec(surv, coef):
        g = [0.0] * dim
        for w in surv:
            row = u_mat[w]
            for j in range(dim):
                g[j] += float(row[j])
        for j in range(dim):
            g[j] *= coef
        return g

    for _epoch in range(config.epochs):
        for d in range(n_docs):
            t_len = int(lengths[d])
            if t_len == 0:
                continue
            rem = 1.0 - float(counter) / budget
            if rem < _LR_FLOOR:
                rem = _LR_FLOOR
            lr = lr0 * rem
            counter += t_len

            doc = [int(t) for t in tokens[offsets[d]:offsets[d + 1]]]
            if discard is not None:
                kept = [w for w in doc if gen.uniform() >= discard[w]]
            else:
                kept = doc
            if len(kept) < 2:
                continue

            coef = scale / float(t_len)
            surv: list[int] = []
            gvec = [0.0] * dim
            gacc = [0.0] * dim
            if use_global and not resample:
                surv = corrupt_once(kept)
                gvec = global_vec(surv, coef)

            for t in range(len(kept)):
                if use_global and resample:
                    surv = corrupt_once(kept)
                    gvec = global_vec(surv, coef)

                b = 1 + int(gen.uniform() * window)
                lo = max(0, t - b)
                hi = min(len(kept) - 1, t + b)
                n_ctx = hi - lo

                z = [0.0] * dim
                for i in range(lo, hi + 1):
                    if i == t:
                        continue
                    row = u_mat[kept[i]]
                    for j in range(dim):
                        z[j] += float(row[j])
                inv_ctx = 1.0
                if mean_combiner:
                    inv_ctx = 1.0 / float(n_ctx)
                    for j in range(dim):
                        z[j] *= inv_ctx
                if use_global:
                    for j in range(dim):
                        z[j] += gvec[j]

                e = [0.0] * dim
                target = kept[t]
                for k in range(n_neg + 1):
                    if k == 0:
                        w, label = target, 1.0
                    else:
                        label = 0.0
                        while True:
                            uu = gen.uniform()
                            if len(neg_table) > 0:
                                w = int(neg_table[int(uu * len(neg_table))])
                            else:
                                w = int(uu * vocab_size)
                            if w != target:
                                break
                    f = 0.0
                    vrow = v_mat[w]
                    for j in range(dim):
                        f += float(vrow[j]) * z[j]
                    p = _sigmoid(f, sig_table)
                    g = (label - p) * lr
                    for j in range(dim):
                        e[j] += g * float(vrow[j])
                    for j in range(dim):
                        vrow[j] = float(vrow[j]) + g * z[j]

                for i in range(lo, hi + 1):
                    if i == t:
                        continue
                    row = u_mat[kept[i]]
                    if mean_combiner:
                        for j in range(dim):
                            row[j] = float(row[j]) + e[j] * inv_ctx
                    else:
                        for j in range(dim):
                            row[j] = float(row[j]) + e[j]
                if use_global:
                    if resample:
                        for w in surv:
                            row = u_mat[w]
                            for j in range(dim):
                                row[j] = float(row[j]) + coef * e[j]
                    else:
                        for j in range(dim):
                            gacc[j] += e[j]
                positions += 1

            if use_global and not resample:
                for w in surv:
                    row = u_mat[w]
                    for j in range(dim):
                        row[j] = float(row[j]) + coef * gacc[j]

    return u_mat, v_mat, positions


def train_cbow_reference(tokens, offsets, lengths, counts, config: TrainConfig):
    """The no-global-context baseline: plain CBoW with negative sampling."""
    if config.global_context:
        raise ValueError("baseline reference requires global_context=False")
    return train_reference(tokens, offsets, lengths, counts, config)
