"""Compiled hot loops: RNG fill, subsampling, corruption, SGD over documents.

Protocol notes (the plain-Python twin in ``reference`` must keep matching):

* RNG is the LCG documented in ``rng``; every draw site and its order is part
  of the contract.
* Embedding arithmetic runs in float64; stores round to the array dtype.
  With ``nogil=True`` workers share the parameter matrices without locks, so
  concurrent column updates may be lost; individual float stores are atomic
  on the platforms we care about.
* Per document visit: learning rate is fixed at visit start; the shared
  progress counter advances by the document's pre-subsampling length; one
  corruption is drawn for the whole visit (unless per-position resampling is
  requested) and the corrupted-context gradient is accumulated across
  positions and applied once at the end of the visit.
"""

import numpy as np
from numba import njit

U64_MULT = np.uint64(6364136223846793005)
U64_ADD = np.uint64(1442695040888963407)
U64_SHIFT = np.uint64(11)
INV53 = 2.0**-53

LR_FLOOR = 1e-4
SIG_CLAMP = 30.0

# optional coarse sigmoid for speed runs: 1024 bins over [-6, 6]
SIG_TABLE_BINS = 1024
SIG_TABLE_MAX = 6.0


def make_sigmoid_table():
    xs = (np.arange(SIG_TABLE_BINS) + 0.5) / SIG_TABLE_BINS * (2 * SIG_TABLE_MAX) - SIG_TABLE_MAX
    return 1.0 / (1.0 + np.exp(-xs))


@njit(inline="always")
def _next(s):
    return s * U64_MULT + U64_ADD


@njit(inline="always")
def _uniform(s):
    s = _next(s)
    return s, np.float64(s >> U64_SHIFT) * INV53


@njit(cache=True)
def fill_uniforms(state_cell, out):
    s = state_cell[0]
    for i in range(out.shape[0]):
        s, u = _uniform(s)
        out[i] = u
    state_cell[0] = s


@njit(inline="always")
def _subsample_into(tokens, start, stop, discard, s, kept):
    """One uniform per token; token survives iff u >= discard[word]."""
    n = 0
    for i in range(start, stop):
        w = tokens[i]
        s, u = _uniform(s)
        if u >= discard[w]:
            kept[n] = w
            n += 1
    return s, n


@njit(inline="always")
def _corrupt_into(kept, n_kept, q, s, surv):
    """One uniform per token; token survives iff u >= q."""
    n = 0
    for i in range(n_kept):
        s, u = _uniform(s)
        if u >= q:
            surv[n] = kept[i]
            n += 1
    return s, n


@njit(cache=True)
def corrupt_sample(tokens, q, state_cell, surv):
    """Public corruption draw over a whole token array. Returns survivor count."""
    s = state_cell[0]
    s, n = _corrupt_into(tokens, tokens.shape[0], q, s, surv)
    state_cell[0] = s
    return n


@njit(cache=True)
def subsample_tokens(tokens, discard, state_cell, kept):
    s = state_cell[0]
    s, n = _subsample_into(tokens, 0, tokens.shape[0], discard, s, kept)
    state_cell[0] = s
    return n


@njit(cache=True)
def corruption_mean_accumulate(tokens, q, n_draws, state_cell, count_sums):
    """Accumulate survivor counts per position over ``n_draws`` corruptions.

    ``count_sums[i]`` ends up holding how many draws kept ``tokens[i]``;
    the MC mean of the weighted bag follows by scaling with 1/((1-q) n).
    Drives the same per-token survival test as the trainer.
    """
    s = state_cell[0]
    n = tokens.shape[0]
    for _ in range(n_draws):
        for i in range(n):
            s, u = _uniform(s)
            if u >= q:
                count_sums[i] += 1
    state_cell[0] = s


@njit(inline="always")
def _draw_negative(s, target, vocab_size, table):
    """One negative != target; uniform over ids, or via the unigram table."""
    while True:
        s, u = _uniform(s)
        if table.shape[0] > 0:
            w = table[np.int64(u * table.shape[0])]
        else:
            w = np.int32(np.int64(u * vocab_size))
        if w != target:
            return s, w


@njit(inline="always")
def _sigmoid_at(f, sig_table):
    if f > SIG_CLAMP:
        f = SIG_CLAMP
    elif f < -SIG_CLAMP:
        f = -SIG_CLAMP
    if sig_table.shape[0] > 0:
        if f >= SIG_TABLE_MAX:
            return sig_table[sig_table.shape[0] - 1]
        if f <= -SIG_TABLE_MAX:
            return sig_table[0]
        idx = np.int64((f + SIG_TABLE_MAX) / (2 * SIG_TABLE_MAX) * sig_table.shape[0])
        return sig_table[idx]
    return 1.0 / (1.0 + np.exp(-f))


@njit(nogil=True, cache=True)
def train_shard(u_mat, v_mat, tokens, offsets, doc_lens, discard, neg_table,
                window, n_neg, q, use_global, resample_per_pos, mean_combiner,
                lr0, budget, counter, state_cell, worker, n_workers, max_len,
                sig_table, out):
    """One epoch of SGD over this worker's shard (docs with index % workers).

    ``out`` receives [loss_sum, positions_processed, first_bad_doc_or_-1].
    """
    dim = u_mat.shape[1]
    vocab_size = u_mat.shape[0]
    n_docs = offsets.shape[0] - 1

    z = np.empty(dim, dtype=np.float64)
    e = np.empty(dim, dtype=np.float64)
    gvec = np.empty(dim, dtype=np.float64)
    gacc = np.empty(dim, dtype=np.float64)
    kept = np.empty(max_len, dtype=np.int32)
    surv = np.empty(max_len, dtype=np.int32)

    s = state_cell[0]
    loss_sum = 0.0
    positions = np.int64(0)
    bad_doc = np.int64(-1)
    scale = 1.0 / (1.0 - q)

    for d in range(n_docs):
        if d % n_workers != worker:
            continue
        t_len = doc_lens[d]
        if t_len == 0:
            continue

        progress = np.float64(counter[0]) / budget
        rem = 1.0 - progress
        if rem < LR_FLOOR:
            rem = LR_FLOOR
        lr = lr0 * rem
        counter[0] += t_len

        start = offsets[d]
        stop = offsets[d + 1]
        if discard.shape[0] > 0:
            s, n_kept = _subsample_into(tokens, start, stop, discard, s, kept)
        else:
            n_kept = stop - start
            for i in range(n_kept):
                kept[i] = tokens[start + i]
        if n_kept < 2:
            continue

        coef = scale / np.float64(t_len)
        n_surv = 0
        if use_global and not resample_per_pos:
            s, n_surv = _corrupt_into(kept, n_kept, q, s, surv)
            for j in range(dim):
                gvec[j] = 0.0
            for i in range(n_surv):
                row = surv[i]
                for j in range(dim):
                    gvec[j] += u_mat[row, j]
            for j in range(dim):
                gvec[j] *= coef
                gacc[j] = 0.0

        doc_loss = 0.0
        for t in range(n_kept):
            if use_global and resample_per_pos:
                s, n_surv = _corrupt_into(kept, n_kept, q, s, surv)
                for j in range(dim):
                    gvec[j] = 0.0
                for i in range(n_surv):
                    row = surv[i]
                    for j in range(dim):
                        gvec[j] += u_mat[row, j]
                for j in range(dim):
                    gvec[j] *= coef

            s, u = _uniform(s)
            b = 1 + np.int64(u * window)
            lo = t - b
            if lo < 0:
                lo = 0
            hi = t + b
            if hi > n_kept - 1:
                hi = n_kept - 1
            n_ctx = hi - lo

            for j in range(dim):
                z[j] = 0.0
            for i in range(lo, hi + 1):
                if i == t:
                    continue
                row = kept[i]
                for j in range(dim):
                    z[j] += u_mat[row, j]
            inv_ctx = 1.0
            if mean_combiner:
                inv_ctx = 1.0 / np.float64(n_ctx)
                for j in range(dim):
                    z[j] *= inv_ctx
            if use_global:
                for j in range(dim):
                    z[j] += gvec[j]

            for j in range(dim):
                e[j] = 0.0
            target = kept[t]
            for k in range(n_neg + 1):
                if k == 0:
                    w = target
                    label = 1.0
                else:
                    s, w = _draw_negative(s, target, vocab_size, neg_table)
                    label = 0.0
                f = 0.0
                for j in range(dim):
                    f += v_mat[w, j] * z[j]
                p = _sigmoid_at(f, sig_table)
                g = (label - p) * lr
                for j in range(dim):
                    e[j] += g * v_mat[w, j]
                for j in range(dim):
                    v_mat[w, j] = v_mat[w, j] + g * z[j]
                if label == 1.0:
                    doc_loss += -np.log(p)
                else:
                    doc_loss += -np.log(1.0 - p)

            for i in range(lo, hi + 1):
                if i == t:
                    continue
                row = kept[i]
                if mean_combiner:
                    for j in range(dim):
                        u_mat[row, j] = u_mat[row, j] + e[j] * inv_ctx
                else:
                    for j in range(dim):
                        u_mat[row, j] = u_mat[row, j] + e[j]
            if use_global:
                if resample_per_pos:
                    for i in range(n_surv):
                        row = surv[i]
                        for j in range(dim):
                            u_mat[row, j] = u_mat[row, j] + coef * e[j]
                else:
                    for j in range(dim):
                        gacc[j] += e[j]
            positions += 1

        if use_global and not resample_per_pos:
            for i in range(n_surv):
                row = surv[i]
                for j in range(dim):
                    u_mat[row, j] = u_mat[row, j] + coef * gacc[j]

        if not np.isfinite(doc_loss):
            bad_doc = d
            break
        loss_sum += doc_loss

    state_cell[0] = s
    out[0] = loss_sum
    out[1] = np.float64(positions)
    out[2] = np.float64(bad_doc)
