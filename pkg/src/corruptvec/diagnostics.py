"""Numerical checks of the corruption-as-regularization analysis.

The per-instance objective is the negative-sampling log likelihood
f(w, c, x~) with the document entering as a weighted bag x~ whose dimensions
are corrupted independently (kept with probability 1-q at weight x_j/(1-q)).
This module evaluates f exactly, estimates E[f] by Monte Carlo and by
exhaustive enumeration of corruption patterns, computes the second-order
expansion of E[f] around the uncorrupted bag with a closed-form Hessian
diagonal, and aggregates the induced per-word regularizer

    R(u_j) = sum_i sum_t x_ij^2 [ sigma(1-sigma)(v_w . u_j / T)^2
                                  + sum_neg sigma'(1-sigma')(v_neg . u_j / T)^2 ]

whose q/(1-q) coefficient is reported alongside. Negatives are frozen per
instance and derived from document content, so results are invariant to
document order and scale exactly under corpus duplication.

Unlike the trainer, nothing here clamps the sigmoid: values feed difference
quotients and second-order expansions, and a clamp would flatten exactly the
curvature being measured.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats

from . import rng as _rng
from .corpus import Document, Vocabulary
from .errors import ParameterError
from .model import ModelParams

EXHAUSTIVE_MAX_DIMS = 12

# distinct stream tag for frozen negative draws; any fixed odd constant works
_NEG_STREAM_SALT = 0xD1A6


@dataclass
class DiagInstance:
    """One deterministic objective: target, window, document bag, frozen
    negatives.

    ``bag_ids``/``bag_counts`` hold the distinct words of the document and
    their multiplicities x_j; ``doc_length`` is T. ``q`` records the
    corruption rate the instance was built for (ops still take q explicitly
    so one instance can be swept over rates).
    """

    target: int
    context: np.ndarray
    bag_ids: np.ndarray
    bag_counts: np.ndarray
    doc_length: int
    negatives: np.ndarray
    q: float


def _log_sigmoid(s: float) -> float:
    # stable in both tails, never clamps
    if s >= 0:
        return -math.log1p(math.exp(-s))
    return s - math.log1p(math.exp(s))


def _sigmoid_exact(s: float) -> float:
    if s >= 0:
        return 1.0 / (1.0 + math.exp(-s))
    e = math.exp(s)
    return e / (1.0 + e)


def _frozen_negatives(tokens: np.ndarray, position: int, k: int,
                      vocab_size: int, target: int, seed: int) -> np.ndarray:
    """k uniform non-target draws seeded by (document content, position).

    Content addressing (not document index) is what makes the regularizer
    invariant to document order and exactly additive under duplication.
    """
    if k > 0 and vocab_size < 2:
        raise ParameterError("need a vocabulary of >= 2 words to draw negatives")
    stream = (_rng.hash_tokens(tokens) + position) * 2 + _NEG_STREAM_SALT
    gen = _rng.Rng(seed, stream=stream)
    out = np.empty(k, dtype=np.int64)
    for i in range(k):
        w = gen.randint(vocab_size)
        while w == target:
            w = gen.randint(vocab_size)
        out[i] = w
    return out


def make_diag_instance(doc: Document, position: int, vocab_size: int,
                       window: int = 5, negatives: int = 5, q: float = 0.9,
                       seed: int = 1) -> DiagInstance:
    """Freeze the objective at one position: fixed +/-window context, whole
    document as the bag, content-seeded negatives."""
    tokens = np.asarray(doc.tokens, dtype=np.int64)
    n = len(tokens)
    if not 0 <= position < n:
        raise ParameterError(f"position {position} outside document of length {n}")
    target = int(tokens[position])
    lo = max(0, position - window)
    hi = min(n - 1, position + window)
    context = np.concatenate([tokens[lo:position], tokens[position + 1:hi + 1]])
    bag_ids, bag_counts = np.unique(tokens, return_counts=True)
    negs = _frozen_negatives(tokens, position, negatives, vocab_size, target, seed)
    return DiagInstance(target, context, bag_ids, bag_counts.astype(np.float64),
                        doc.original_length, negs, q)


def make_diag_instances(docs, vocab_size: int, window: int = 5,
                        negatives: int = 5, q: float = 0.9,
                        seed: int = 1) -> list[DiagInstance]:
    out = []
    for doc in docs:
        for t in range(len(doc.tokens)):
            out.append(make_diag_instance(doc, t, vocab_size, window,
                                          negatives, q, seed))
    return out


def _hidden_at(params: ModelParams, inst: DiagInstance, values: np.ndarray):
    u = params.input_vectors.astype(np.float64)
    z = np.zeros(params.dim, dtype=np.float64)
    for c in inst.context:
        z += u[c]
    z += (values / inst.doc_length) @ u[inst.bag_ids]
    return z


def exact_f(params: ModelParams, inst: DiagInstance,
            values: np.ndarray | None = None) -> float:
    """Log likelihood at a given bag weighting (default: the uncorrupted x)."""
    if values is None:
        values = inst.bag_counts
    z = _hidden_at(params, inst, np.asarray(values, dtype=np.float64))
    v = params.output_vectors.astype(np.float64)
    f = _log_sigmoid(float(v[inst.target] @ z))
    for w in inst.negatives:
        f += _log_sigmoid(-float(v[w] @ z))
    return f


def hessian_diag(params: ModelParams, inst: DiagInstance) -> np.ndarray:
    """Closed-form d^2 f / d x_j^2 at the uncorrupted bag, one entry per
    bag dimension."""
    z = _hidden_at(params, inst, inst.bag_counts)
    u = params.input_vectors.astype(np.float64)
    v = params.output_vectors.astype(np.float64)
    t = float(inst.doc_length)
    out = np.zeros(len(inst.bag_ids), dtype=np.float64)
    for w in [inst.target, *inst.negatives]:
        sig = _sigmoid_exact(float(v[w] @ z))
        proj = (u[inst.bag_ids] @ v[w]) / t
        out -= sig * (1.0 - sig) * proj**2
    return out


def taylor_expected_f(params: ModelParams, inst: DiagInstance, q: float) -> float:
    """Second-order expansion of E[f]: exact_f + 1/2 sum_j Var_j * H_jj with
    Var_j = q/(1-q) x_j^2."""
    _check_rate(q)
    base = exact_f(params, inst)
    var = (q / (1.0 - q)) * inst.bag_counts**2
    return base + 0.5 * float(var @ hessian_diag(params, inst))


def mc_expected_f(params: ModelParams, inst: DiagInstance, q: float,
                  n_samples: int, rng) -> tuple[float, float]:
    """Monte-Carlo E[f] over corrupted bags, returned with its standard error.

    The estimate is centered on exact_f (a control variate at zero cost), so
    at q=0 every sample deviation is exactly 0.0 and the mean collapses to
    exact_f with se 0.
    """
    _check_rate(q)
    if n_samples < 2:
        raise ParameterError(f"need n_samples >= 2, got {n_samples}")
    base = exact_f(params, inst)
    scale = 1.0 / (1.0 - q)
    m = len(inst.bag_ids)
    deltas = np.empty(n_samples, dtype=np.float64)
    values = np.empty(m, dtype=np.float64)
    for i in range(n_samples):
        draws = rng.uniforms(m)
        for j in range(m):
            values[j] = inst.bag_counts[j] * scale if draws[j] >= q else 0.0
        deltas[i] = exact_f(params, inst, values) - base
    mean = base + float(deltas.mean())
    se = float(deltas.std(ddof=1) / math.sqrt(n_samples))
    return mean, se


def exhaustive_expected_f(params: ModelParams, inst: DiagInstance, q: float) -> float:
    """Exact E[f] by enumerating all 2^m keep/drop patterns of the bag."""
    _check_rate(q)
    m = len(inst.bag_ids)
    if m > EXHAUSTIVE_MAX_DIMS:
        raise ParameterError(
            f"bag has {m} dimensions, enumeration capped at {EXHAUSTIVE_MAX_DIMS}")
    scale = 1.0 / (1.0 - q)
    terms = []
    values = np.empty(m, dtype=np.float64)
    for pattern in range(1 << m):
        prob = 1.0
        for j in range(m):
            if pattern >> j & 1:
                prob *= 1.0 - q
                values[j] = inst.bag_counts[j] * scale
            else:
                prob *= q
                values[j] = 0.0
        if prob == 0.0:
            continue
        terms.append(prob * exact_f(params, inst, values))
    return math.fsum(terms)


@dataclass
class RegularizerReport:
    word_ids: np.ndarray
    values: np.ndarray
    counts: np.ndarray
    coefficient: float

    def to_dict(self, vocab: Vocabulary | None = None) -> dict:
        rows = []
        for i, wid in enumerate(self.word_ids):
            row = {"word_id": int(wid), "regularizer": float(self.values[i]),
                   "count": int(self.counts[i])}
            if vocab is not None:
                row["word"] = vocab.words[wid]
            rows.append(row)
        return {"coefficient": self.coefficient, "words": rows}


def regularizer(params: ModelParams, docs, word_id: int, q: float,
                window: int = 5, negatives: int = 5, seed: int = 1) -> float:
    """R(u_j) for one word by the direct per-position sum (slow path)."""
    _check_rate(q)
    u = params.input_vectors.astype(np.float64)
    v = params.output_vectors.astype(np.float64)
    uj = u[word_id]
    terms = []
    for doc in docs:
        tokens = np.asarray(doc.tokens, dtype=np.int64)
        x_ij = float(np.count_nonzero(tokens == word_id))
        if x_ij == 0.0:
            continue
        t_len = float(doc.original_length)
        for pos in range(len(tokens)):
            inst = make_diag_instance(doc, pos, params.vocab_size, window,
                                      negatives, q, seed)
            z = _hidden_at(params, inst, inst.bag_counts)
            acc = 0.0
            for w in [inst.target, *inst.negatives]:
                sig = _sigmoid_exact(float(v[w] @ z))
                acc += sig * (1.0 - sig) * (float(v[w] @ uj) / t_len) ** 2
            terms.append(x_ij * x_ij * acc)
    return math.fsum(terms)


def regularizer_report(params: ModelParams, docs, q: float, window: int = 5,
                       negatives: int = 5, seed: int = 1,
                       counts: np.ndarray | None = None) -> RegularizerReport:
    """R(u_j) for every word appearing in ``docs`` (vectorized per instance).

    Per-word totals are full-precision sums of per-instance terms, so the
    report is exactly invariant to document order and exactly doubles when
    every document is duplicated.
    """
    _check_rate(q)
    u64 = params.input_vectors.astype(np.float64)
    v64 = params.output_vectors.astype(np.float64)
    per_word: dict[int, list[float]] = {}
    tally: dict[int, int] = {}
    for doc in docs:
        tokens = np.asarray(doc.tokens, dtype=np.int64)
        bag_ids, bag_counts = np.unique(tokens, return_counts=True)
        for wid, cnt in zip(bag_ids, bag_counts):
            tally[int(wid)] = tally.get(int(wid), 0) + int(cnt)
        u_bag = u64[bag_ids]
        x_sq = bag_counts.astype(np.float64) ** 2
        t_len = float(doc.original_length)
        for pos in range(len(tokens)):
            inst = make_diag_instance(doc, pos, params.vocab_size, window,
                                      negatives, q, seed)
            z = _hidden_at(params, inst, inst.bag_counts)
            scorers = np.concatenate([[inst.target], inst.negatives]).astype(np.int64)
            sig = np.array([_sigmoid_exact(float(v64[w] @ z)) for w in scorers])
            weights = sig * (1.0 - sig)
            proj = (u_bag @ v64[scorers].T) / t_len
            inst_terms = x_sq * (proj**2 @ weights)
            for j, wid in enumerate(bag_ids):
                per_word.setdefault(int(wid), []).append(float(inst_terms[j]))
    word_ids = np.array(sorted(per_word), dtype=np.int64)
    values = np.array([math.fsum(per_word[int(w)]) for w in word_ids])
    if counts is not None:
        cnt_arr = np.asarray(counts)[word_ids]
    else:
        cnt_arr = np.array([tally[int(w)] for w in word_ids], dtype=np.int64)
    return RegularizerReport(word_ids, values, cnt_arr, q / (1.0 - q))


def reg_frequency_correlation(report: RegularizerReport,
                              vocab: Vocabulary | None = None):
    """Spearman rank correlation between word frequency and R(u_j).

    Uses the report's counts (or the vocabulary's when given). Under random
    parameters the analysis predicts a positive correlation: frequent words
    accumulate more and larger squared-multiplicity terms.
    """
    counts = (vocab.counts[report.word_ids] if vocab is not None
              else report.counts)
    if len(np.unique(counts)) < 3:
        raise ParameterError("need at least 3 distinct counts for a rank correlation")
    rho, pvalue = stats.spearmanr(counts, report.values)
    return float(rho), float(pvalue)


def _check_rate(q: float) -> None:
    if not 0.0 <= q < 1.0:
        raise ParameterError(f"corruption rate must satisfy 0 <= q < 1, got {q}")
