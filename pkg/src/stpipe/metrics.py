"""WER, corpus BLEU and mWER-realigned BLEU for unsegmented system output.

Tokens are compared exactly as given; callers tokenize upstream (whitespace
split is what the CLI does).
"""

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, List, Sequence, Tuple

import numpy as np

from . import kernels
from .errors import EmptyReference, LengthMismatch, StpipeError

Tokens = Sequence[str]


@dataclass(frozen=True)
class EditCounts:
    distance: int
    subs: int
    ins: int
    dels: int


@dataclass
class ScoreReport:
    bleu: float
    wer: float
    precisions: List[float]
    brevity_penalty: float
    segments: int
    hyp_len: int
    ref_len: int
    boundaries: List[int] = field(default_factory=list)

    def to_dict(self):
        d = {"bleu": self.bleu}
        for n, p in enumerate(self.precisions, 1):
            d[f"p{n}"] = p
        d.update(BP=self.brevity_penalty, wer=self.wer, segments=self.segments,
                 hyp_len=self.hyp_len, ref_len=self.ref_len)
        if self.boundaries:
            d["boundaries"] = " ".join(str(b) for b in self.boundaries)
        return d

    def to_text(self):
        lines = []
        for key, value in self.to_dict().items():
            if isinstance(value, float):
                value = f"{value:.4f}"
            lines.append(f"{key} = {value}")
        return "\n".join(lines) + "\n"


def edit_distance(a: Tokens, b: Tokens) -> EditCounts:
    """Unit-cost Levenshtein distance from ``a`` (reference) to ``b``.

    Operation counts come from one optimal backtrace that prefers
    substitution/match, then deletion (token of ``a`` dropped), then
    insertion (extra token in ``b``).
    """
    ia, ib = kernels.encode(a, b)
    table = kernels.levenshtein_table(ia, ib)
    subs, dels, ins = kernels.backtrace_counts(table, ia, ib)
    return EditCounts(int(table[-1, -1]), int(subs), int(ins), int(dels))


def wer(ref: Tokens, hyp: Tokens) -> float:
    if len(ref) == 0:
        raise EmptyReference("reference is empty; WER undefined")
    return edit_distance(ref, hyp).distance / len(ref)


def _ngrams(tokens, n):
    return Counter(tuple(tokens[i:i + n]) for i in range(len(tokens) - n + 1))


def bleu_stats(ref: Tokens, hyp: Tokens, max_n=4):
    """Per-segment sufficient statistics: (matches[n], totals[n], hyp_len, ref_len)."""
    matches = [0] * max_n
    totals = [0] * max_n
    for n in range(1, max_n + 1):
        h = _ngrams(hyp, n)
        r = _ngrams(ref, n)
        matches[n - 1] = sum(min(c, r[g]) for g, c in h.items())
        totals[n - 1] = max(len(hyp) - n + 1, 0)
    return matches, totals, len(hyp), len(ref)


def bleu_corpus(refs: Sequence[Tokens], hyps: Sequence[Tokens], max_n=4,
                case_sensitive=True) -> ScoreReport:
    """Single-reference corpus BLEU without smoothing.

    An n-gram order with no hypothesis n-grams at all has precision 0, so
    the score is 0 in that case, as with any zero-match order.
    """
    if len(refs) != len(hyps):
        raise LengthMismatch(f"{len(refs)} references vs {len(hyps)} hypotheses")
    if not refs:
        raise LengthMismatch("corpus is empty")
    if not case_sensitive:
        refs = [[t.lower() for t in r] for r in refs]
        hyps = [[t.lower() for t in h] for h in hyps]

    matches = [0] * max_n
    totals = [0] * max_n
    c = r = 0
    errors = 0
    for ref, hyp in zip(refs, hyps):
        m, t, hl, rl = bleu_stats(ref, hyp, max_n)
        for i in range(max_n):
            matches[i] += m[i]
            totals[i] += t[i]
        c += hl
        r += rl
        errors += edit_distance(ref, hyp).distance

    precisions = [m / t if t else 0.0 for m, t in zip(matches, totals)]
    if c == 0:
        bp = 0.0
    elif c < r:
        bp = math.exp(1.0 - r / c)
    else:
        bp = 1.0
    if min(precisions) > 0:
        score = 100.0 * bp * math.exp(sum(math.log(p) for p in precisions) / max_n)
    else:
        score = 0.0
    return ScoreReport(
        bleu=score,
        wer=errors / r if r else 0.0,
        precisions=precisions,
        brevity_penalty=bp,
        segments=len(refs),
        hyp_len=c,
        ref_len=r,
    )


def mwer_resegment(hyp_stream: Tokens, ref_segments: Sequence[Tokens]) -> Tuple[List[List[str]], int]:
    """Cut ``hyp_stream`` into ``len(ref_segments)`` contiguous pieces minimizing total edit distance.

    The minimum over all partitions equals the edit distance between the
    stream and the concatenated reference, since every alignment path
    crosses each reference boundary row at some stream position. Cuts are
    then fixed left to right at the earliest position that can still
    complete to the optimum, checked against the suffix distance table.

    Returns the segments and the optimal total cost.
    """
    k = len(ref_segments)
    if k < 1:
        raise LengthMismatch("need at least one reference segment")
    hyp = list(hyp_stream)
    if k == 1:
        return [hyp], edit_distance(ref_segments[0], hyp).distance

    encoded = kernels.encode(hyp, *ref_segments)
    h = encoded[0]
    refs = encoded[1:]
    big_r = np.concatenate(refs) if any(len(x) for x in refs) else np.zeros(0, np.int64)
    m, n = big_r.shape[0], h.shape[0]
    # suffix[r', j'] = ED(R[m-r':], H[n-j':])
    suffix = kernels.levenshtein_table(big_r[::-1].copy(), h[::-1].copy())
    best = int(suffix[m, n])

    cuts = [0]
    acc = 0
    row_start = 0
    for ref in refs[:-1]:
        c = cuts[-1]
        row_start += ref.shape[0]
        row = kernels.levenshtein_table(ref, h[c:])[-1]
        for x in range(n - c + 1):
            if acc + row[x] + suffix[m - row_start, n - c - x] == best:
                acc += int(row[x])
                cuts.append(c + x)
                break
        else:  # pragma: no cover - optimum is always reachable
            raise AssertionError("realignment backtrace failed")
    cuts.append(n)
    segs = [hyp[cuts[i]:cuts[i + 1]] for i in range(k)]
    return segs, best


def flatten(hyp) -> List[str]:
    """Accept a flat token list or a list of token lists."""
    hyp = list(hyp)
    if hyp and not isinstance(hyp[0], str):
        return [t for seg in hyp for t in seg]
    return hyp


def score_speech_translation(hyp_stream, ref_segments: Sequence[Tokens],
                             case_sensitive=True, max_n=4) -> ScoreReport:
    """Realign the flattened hypothesis to the reference segmentation, then score BLEU."""
    stream = flatten(hyp_stream)
    refs = [list(r) for r in ref_segments]
    if not case_sensitive:
        stream = [t.lower() for t in stream]
        refs = [[t.lower() for t in r] for r in refs]
    segs, _ = mwer_resegment(stream, refs)
    report = bleu_corpus(refs, segs, max_n=max_n)
    bounds = []
    pos = 0
    for s in segs:
        pos += len(s)
        bounds.append(pos)
    report.boundaries = bounds
    return report


def parse_ctm(lines) -> Dict[str, List[str]]:
    """Group CTM lines ``utt channel start dur word [conf]`` into per-utterance word streams.

    Utterances keep first-appearance order; words are ordered by start time
    (stable for equal times).
    """
    words: Dict[str, List[Tuple[float, int, str]]] = {}
    for lineno, line in enumerate(lines):
        line = line.strip()
        if not line or line.startswith(";;"):
            continue
        parts = line.split()
        if len(parts) < 5:
            raise StpipeError(f"CTM line {lineno + 1}: expected >= 5 fields, got {len(parts)}")
        utt, _chan, start, _dur, word = parts[:5]
        words.setdefault(utt, []).append((float(start), lineno, word))
    return {utt: [w for _, _, w in sorted(ws)] for utt, ws in words.items()}
