"""Hot numeric kernels.

Every kernel exists twice: a ``*_loops`` form written for ``@njit`` and a
``*_numpy`` form that vectorizes what it can. The public names bind to the
compiled loop form when numba is active and to the numpy form otherwise
(see :mod:`stpipe._accel`). Both forms must return identical results; the
test-suite and ``benchmarks/bench_kernels.py`` exercise them side by side.

All token inputs are 1-D ``int64`` arrays of vocabulary ids.
"""

import numpy as np

from ._accel import HAVE_NUMBA, njit


# ---------------------------------------------------------------------------
# Levenshtein table
# ---------------------------------------------------------------------------

def _lev_table_loops(a, b):
    m = a.shape[0]
    n = b.shape[0]
    d = np.empty((m + 1, n + 1), dtype=np.int64)
    for j in range(n + 1):
        d[0, j] = j
    for i in range(1, m + 1):
        d[i, 0] = i
        ai = a[i - 1]
        for j in range(1, n + 1):
            best = d[i - 1, j - 1] + (0 if ai == b[j - 1] else 1)
            up = d[i - 1, j] + 1
            if up < best:
                best = up
            left = d[i, j - 1] + 1
            if left < best:
                best = left
            d[i, j] = best
    return d


def _lev_table_numpy(a, b):
    m = a.shape[0]
    n = b.shape[0]
    d = np.empty((m + 1, n + 1), dtype=np.int64)
    d[0] = np.arange(n + 1)
    cols = np.arange(n + 1)
    for i in range(1, m + 1):
        prev = d[i - 1]
        tmp = np.empty(n + 1, dtype=np.int64)
        tmp[0] = i
        tmp[1:] = np.minimum(prev[1:] + 1, prev[:-1] + (b != a[i - 1]))
        # the row-internal insertion chain d[i,j] = min_k (tmp[k] + j - k)
        d[i] = np.minimum.accumulate(tmp - cols) + cols
    return d


# ---------------------------------------------------------------------------
# Edit-operation counts along one optimal backtrace
# ---------------------------------------------------------------------------

def _backtrace_counts(d, a, b):
    """Walk back from the corner preferring diagonal, then deletion, then insertion."""
    i = a.shape[0]
    j = b.shape[0]
    subs = 0
    dels = 0
    ins = 0
    while i > 0 or j > 0:
        if i > 0 and j > 0:
            cost = 0 if a[i - 1] == b[j - 1] else 1
            if d[i, j] == d[i - 1, j - 1] + cost:
                subs += cost
                i -= 1
                j -= 1
                continue
        if i > 0 and d[i, j] == d[i - 1, j] + 1:
            dels += 1
            i -= 1
            continue
        ins += 1
        j -= 1
    return subs, dels, ins


# ---------------------------------------------------------------------------
# Sentence re-segmentation DP
# ---------------------------------------------------------------------------

def _cut_chain(back, end, out):
    """Fill ``out`` with the cut positions leading to ``end``; returns count."""
    k = 0
    pos = end
    while pos > 0:
        out[k] = pos
        k += 1
        pos = back[pos]
    # reverse in place so cuts run left to right
    for x in range(k // 2):
        tmp = out[x]
        out[x] = out[k - 1 - x]
        out[k - 1 - x] = tmp
    return k


def _prefer_left(back, j1, j2, buf1, buf2):
    """True when the chain through ``j1`` has lexicographically smaller cuts."""
    k1 = _cut_chain(back, j1, buf1)
    k2 = _cut_chain(back, j2, buf2)
    lim = k1 if k1 < k2 else k2
    for x in range(lim):
        if buf1[x] != buf2[x]:
            return buf1[x] < buf2[x]
    return k1 <= k2


def _segment_dp_loops(gain, n, min_len, max_len, relax_last):
    """Best cut set over ``n`` tokens.

    ``gain[p]`` (p = 1..n-1) is the score change for cutting after token p.
    Position ``n`` is the implicit final boundary. Returns ``back`` pointers
    (``back[p]`` = previous cut, 0 = start) and a flag telling whether a
    feasible segmentation exists. When ``relax_last`` is set the final
    segment may be shorter than ``min_len``.
    """
    neg = -np.inf
    score = np.full(n + 1, neg)
    nseg = np.zeros(n + 1, dtype=np.int64)
    back = np.full(n + 1, -1, dtype=np.int64)
    score[0] = 0.0
    buf1 = np.empty(n + 1, dtype=np.int64)
    buf2 = np.empty(n + 1, dtype=np.int64)
    for p in range(1, n + 1):
        lo = min_len
        if p == n and relax_last:
            lo = 1
        g = gain[p] if p < n else 0.0
        for length in range(lo, max_len + 1):
            j = p - length
            if j < 0:
                break
            if score[j] == neg:
                continue
            cand = score[j] + g
            cseg = nseg[j] + 1
            take = False
            if back[p] < 0:
                take = True
            elif cand > score[p]:
                take = True
            elif cand == score[p]:
                if cseg < nseg[p]:
                    take = True
                elif cseg == nseg[p]:
                    take = _prefer_left(back, j, back[p], buf1, buf2)
            if take:
                score[p] = cand
                nseg[p] = cseg
                back[p] = j
    return back, score[n] != neg


# ---------------------------------------------------------------------------
# Lexicon EM expectation step
# ---------------------------------------------------------------------------

def _em_estep_loops(t, pair_ids, row_ids, n_rows, n_pairs, log_norm):
    """Expected pair counts and corpus log-likelihood under ``t``.

    ``pair_ids[k]`` indexes the (target, source) parameter of alignment
    link k; ``row_ids[k]`` is the target-token occurrence that link belongs
    to. ``log_norm`` is the summed ``log(l + 1)`` alignment prior.
    """
    denom = np.zeros(n_rows)
    for k in range(pair_ids.shape[0]):
        denom[row_ids[k]] += t[pair_ids[k]]
    counts = np.zeros(n_pairs)
    for k in range(pair_ids.shape[0]):
        counts[pair_ids[k]] += t[pair_ids[k]] / denom[row_ids[k]]
    ll = 0.0
    for r in range(n_rows):
        ll += np.log(denom[r])
    return counts, ll - log_norm


def _em_estep_numpy(t, pair_ids, row_ids, n_rows, n_pairs, log_norm):
    probs = t[pair_ids]
    denom = np.bincount(row_ids, weights=probs, minlength=n_rows)
    counts = np.bincount(pair_ids, weights=probs / denom[row_ids], minlength=n_pairs)
    return counts, float(np.log(denom).sum()) - log_norm


# ---------------------------------------------------------------------------
# Logistic-regression SGD over sparse binary features
# ---------------------------------------------------------------------------

def _sgd_epoch(weights, bias, feat_idx, feat_ptr, labels, order, lr):
    """One pass of log-loss SGD in ``order``; updates ``weights`` in place, returns new bias.

    Example ``k`` owns features ``feat_idx[feat_ptr[k]:feat_ptr[k + 1]]``
    (all with value 1).
    """
    for k in order:
        z = bias
        for q in range(feat_ptr[k], feat_ptr[k + 1]):
            z += weights[feat_idx[q]]
        if z >= 0:
            p = 1.0 / (1.0 + np.exp(-z))
        else:
            ez = np.exp(z)
            p = ez / (1.0 + ez)
        g = p - labels[k]
        bias -= lr * g
        for q in range(feat_ptr[k], feat_ptr[k + 1]):
            weights[feat_idx[q]] -= lr * g
    return bias


def _logloss_loops(weights, bias, feat_idx, feat_ptr, labels):
    total = 0.0
    n = labels.shape[0]
    for k in range(n):
        z = bias
        for q in range(feat_ptr[k], feat_ptr[k + 1]):
            z += weights[feat_idx[q]]
        # log(1 + exp(-y z)) with y in {-1, +1}
        m = z if labels[k] > 0.5 else -z
        if m > 0:
            total += np.log1p(np.exp(-m))
        else:
            total += -m + np.log1p(np.exp(m))
    return total / n


def _logloss_numpy(weights, bias, feat_idx, feat_ptr, labels):
    n = labels.shape[0]
    owner = np.repeat(np.arange(n), np.diff(feat_ptr))
    z = bias + np.bincount(owner, weights=weights[feat_idx], minlength=n)
    m = np.where(labels > 0.5, z, -z)
    return float(np.logaddexp(0.0, -m).mean())


# ---------------------------------------------------------------------------
# Bindings
# ---------------------------------------------------------------------------

if HAVE_NUMBA:
    lev_table_loops = njit(_lev_table_loops)
    backtrace_counts = njit(_backtrace_counts)
    _cut_chain = njit(_cut_chain)
    _prefer_left = njit(_prefer_left)
    segment_dp = njit(_segment_dp_loops)
    em_estep_loops = njit(_em_estep_loops)
    sgd_epoch = njit(_sgd_epoch)
    logloss_loops = njit(_logloss_loops)
    levenshtein_table = lev_table_loops
    em_estep = em_estep_loops
    logloss = logloss_loops
else:
    lev_table_loops = _lev_table_loops
    backtrace_counts = _backtrace_counts
    segment_dp = _segment_dp_loops
    em_estep_loops = _em_estep_loops
    sgd_epoch = _sgd_epoch
    logloss_loops = _logloss_loops
    levenshtein_table = _lev_table_numpy
    em_estep = _em_estep_numpy
    logloss = _logloss_numpy

lev_table_numpy = _lev_table_numpy
em_estep_numpy = _em_estep_numpy
logloss_numpy = _logloss_numpy


def encode(*seqs):
    """Map token sequences to int64 id arrays over a shared vocabulary."""
    vocab = {}
    out = []
    for seq in seqs:
        out.append(np.fromiter((vocab.setdefault(tok, len(vocab)) for tok in seq),
                               dtype=np.int64, count=len(seq)))
    return out
