"""Unbiased mask-out corruption of a document's bag-of-words.

Each token occurrence is dropped independently with probability q; survivors
carry weight 1/(1-q), so the expected weighted bag equals the original bag.
Moments of the implied per-word random vector are available in closed form
for the diagnostics module.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .corpus import Document
from .errors import ParameterError


@dataclass
class CorruptedContext:
    """Survivor token ids (a sub-multiset of the source doc) plus the scale."""

    surviving_tokens: np.ndarray
    scale: float
    source_length: int

    def __len__(self) -> int:
        return len(self.surviving_tokens)


def _check_rate(q: float) -> None:
    if not 0.0 <= q < 1.0:
        raise ParameterError(f"corruption rate must satisfy 0 <= q < 1, got {q}")


def corrupt(doc: Document, q: float, rng) -> CorruptedContext:
    """Draw one corruption of ``doc``; one rng draw per token, in order."""
    _check_rate(q)
    if len(doc.tokens) == 0:
        raise ParameterError("cannot corrupt an empty document")
    tokens = np.ascontiguousarray(doc.tokens, dtype=np.int32)
    surv = np.empty(len(tokens), dtype=np.int32)
    n = _kernels.corrupt_sample(tokens, q, rng.state_cell(), surv)
    return CorruptedContext(surv[:n].copy(), 1.0 / (1.0 - q), doc.original_length)


def corrupt_bag(doc: Document, q: float, rng):
    """Per-dimension corruption of the distinct-word bag.

    Where :func:`corrupt` drops token occurrences one by one, this drops each
    distinct word's whole bag entry as a unit: entry j keeps value
    x_j/(1-q) with probability 1-q, else 0. This is the granularity whose
    moments :func:`corruption_moments` describes; the two coincide for
    multiplicity-1 words. Returns (word_ids, values). One rng draw per
    distinct word, in ascending-id order.
    """
    _check_rate(q)
    if len(doc.tokens) == 0:
        raise ParameterError("cannot corrupt an empty document")
    ids, mult = np.unique(np.asarray(doc.tokens, dtype=np.int64), return_counts=True)
    draws = rng.uniforms(len(ids))
    values = np.where(draws >= q, mult / (1.0 - q), 0.0)
    return ids, values


def corruption_moments(doc: Document, q: float):
    """Mean and diagonal variance of the weighted corrupted bag.

    Returns (word_ids, mean, var) over the distinct words of ``doc``:
    mean_j is word j's multiplicity x_j (unbiasedness) and
    var_j = q/(1-q) * x_j^2. Words absent from the doc have mean 0 and
    variance 0 and are omitted.
    """
    _check_rate(q)
    ids, mult = np.unique(np.asarray(doc.tokens, dtype=np.int64), return_counts=True)
    mean = mult.astype(np.float64)
    var = (q / (1.0 - q)) * mean**2
    return ids, mean, var


def corrupted_bag_mean(doc: Document, q: float, n_draws: int, rng):
    """Monte-Carlo mean of the weighted bag over ``n_draws`` corruptions.

    Estimates E[scale * survivor count] per token position; aggregating
    positions of the same word gives the per-word bag estimate. Uses the
    same per-token survival test as training.
    """
    _check_rate(q)
    if n_draws < 1:
        raise ParameterError(f"n_draws must be >= 1, got {n_draws}")
    tokens = np.ascontiguousarray(doc.tokens, dtype=np.int32)
    count_sums = np.zeros(len(tokens), dtype=np.int64)
    _kernels.corruption_mean_accumulate(tokens, q, n_draws, rng.state_cell(), count_sums)
    per_position = count_sums / ((1.0 - q) * n_draws)
    ids = np.unique(tokens.astype(np.int64))
    mean = np.array([per_position[tokens == i].sum() for i in ids])
    return ids, mean
