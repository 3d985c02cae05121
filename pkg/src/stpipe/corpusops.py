"""Bitext cleaning: length and duplicate filters, an EM word-translation
lexicon for cross-lingual similarity, and z-score rejection of outlier
utterance scores.
"""

import math
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from . import kernels
from .errors import EmptyCorpus, EmptySide, TooFew

NULL = "<null>"
FLOOR = 1e-6


@dataclass(frozen=True)
class SentencePair:
    source: str
    target: str
    id: Optional[str] = None

    @property
    def source_tokens(self) -> List[str]:
        return self.source.split()

    @property
    def target_tokens(self) -> List[str]:
        return self.target.split()


def read_bitext(lines: Iterable[str]) -> List[SentencePair]:
    """Parse ``source<TAB>target`` lines; blank lines are skipped."""
    pairs = []
    for lineno, line in enumerate(lines, 1):
        line = line.rstrip("\n").rstrip("\r")
        if not line.strip():
            continue
        if line.count("\t") != 1:
            raise EmptySide(f"bitext line {lineno}: expected exactly one TAB")
        src, tgt = line.split("\t")
        pairs.append(SentencePair(src, tgt))
    return pairs


def write_bitext(pairs: Iterable[SentencePair]) -> str:
    return "".join(f"{p.source}\t{p.target}\n" for p in pairs)


# ---------------------------------------------------------------------------
# simple filters
# ---------------------------------------------------------------------------

def filter_length(pairs: Sequence[SentencePair], max_words: int = 100) -> List[SentencePair]:
    return [p for p in pairs
            if len(p.source_tokens) <= max_words and len(p.target_tokens) <= max_words]


def dedup(pairs: Sequence[SentencePair]) -> List[SentencePair]:
    seen = set()
    out = []
    for p in pairs:
        key = (p.source, p.target)
        if key not in seen:
            seen.add(key)
            out.append(p)
    return out


def filter_outlier_scores(items: Sequence[Tuple[str, float]], z_threshold: float) -> List[str]:
    """Ids whose score lies within ``z_threshold`` population std-devs of the mean (boundary kept)."""
    if len(items) < 2:
        raise TooFew(f"need at least 2 scored items, got {len(items)}")
    scores = np.array([float(s) for _, s in items])
    mean = scores.mean()
    sigma = scores.std()
    # tolerance absorbs rounding in mean/std so exact-boundary items stay in
    slack = 1e-12 * max(1.0, abs(mean), sigma)
    limit = z_threshold * sigma + slack
    return [i for (i, _), s in zip(items, scores) if abs(s - mean) <= limit]


# ---------------------------------------------------------------------------
# lexicon
# ---------------------------------------------------------------------------

@dataclass
class LexiconModel:
    """Word-translation table ``t(target | source)`` with a null source word.

    Only co-occurring (target, source) pairs are stored; anything else has
    probability zero (lifted to ``FLOOR`` when scoring).
    """

    probs: Dict[Tuple[str, str], float]
    loglik: List[float]

    def t(self, target: str, source: str) -> float:
        return self.probs.get((target, source), 0.0)

    def source_totals(self) -> Dict[str, float]:
        totals: Dict[str, float] = {}
        for (_, src), p in self.probs.items():
            totals[src] = totals.get(src, 0.0) + p
        return totals

    def best_by_target(self) -> Dict[str, Dict[str, float]]:
        table: Dict[str, Dict[str, float]] = {}
        for (tgt, src), p in self.probs.items():
            table.setdefault(tgt, {})[src] = p
        return table

    def to_lines(self) -> str:
        rows = sorted(self.probs.items())
        return "".join(f"{tgt}\t{src}\t{p:.12g}\n" for (tgt, src), p in rows)

    @classmethod
    def from_lines(cls, lines: Iterable[str]) -> "LexiconModel":
        probs = {}
        for lineno, line in enumerate(lines, 1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise EmptySide(f"lexicon line {lineno}: expected target<TAB>source<TAB>prob")
            probs[(parts[0], parts[1])] = float(parts[2])
        return cls(probs, [])


class _Links:
    """Flattened alignment links for the whole corpus (one per target token x source position)."""

    def __init__(self, corpus):
        index: Dict[Tuple[str, str], int] = {}
        pair_ids = []
        row_ids = []
        row = 0
        log_norm = 0.0
        for src, tgt in corpus:
            sources = [NULL] + list(src)
            for f in tgt:
                for e in sources:
                    pair_ids.append(index.setdefault((f, e), len(index)))
                    row_ids.append(row)
                row += 1
            log_norm += len(tgt) * math.log(len(sources))
        self.index = index
        self.pairs = list(index)
        self.pair_ids = np.asarray(pair_ids, dtype=np.int64)
        self.row_ids = np.asarray(row_ids, dtype=np.int64)
        self.n_rows = row
        self.log_norm = log_norm
        sources = {}
        self.pair_src = np.asarray([sources.setdefault(e, len(sources)) for _, e in self.pairs],
                                   dtype=np.int64)
        self.n_src = len(sources)

    def normalize(self, counts):
        totals = np.bincount(self.pair_src, weights=counts, minlength=self.n_src)
        return counts / totals[self.pair_src]


def train_lexicon(pairs: Sequence[SentencePair], iterations: int, reverse: bool = False) -> LexiconModel:
    """EM estimate of ``t(target | source)`` with a null source word.

    Initialization is uniform over each source word's co-occurring targets.
    ``loglik`` holds the corpus log-likelihood of the initial table and of
    the table after every iteration (``iterations + 1`` values). With
    ``reverse`` the roles of the two sides are swapped.
    """
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    corpus = []
    for p in pairs:
        src, tgt = p.source_tokens, p.target_tokens
        if reverse:
            src, tgt = tgt, src
        if tgt:
            corpus.append((src, tgt))
    if not corpus:
        raise EmptyCorpus("no sentence pairs with a non-empty target side")

    links = _Links(corpus)
    n_pairs = len(links.pairs)
    t = links.normalize(np.ones(n_pairs))
    history = []
    for _ in range(iterations):
        counts, ll = kernels.em_estep(t, links.pair_ids, links.row_ids, links.n_rows,
                                      n_pairs, links.log_norm)
        history.append(float(ll))
        t = links.normalize(counts)
    _, ll = kernels.em_estep(t, links.pair_ids, links.row_ids, links.n_rows,
                             n_pairs, links.log_norm)
    history.append(float(ll))
    probs = {pair: float(p) for pair, p in zip(links.pairs, t)}
    return LexiconModel(probs, history)


def _coverage(target: Sequence[str], source: Sequence[str], model: LexiconModel) -> float:
    sources = [NULL] + list(source)
    total = 0.0
    for f in target:
        best = FLOOR
        for e in sources:
            p = model.t(f, e)
            if p > best:
                best = p
        total += best
    return total / len(target)


def similarity(pair: SentencePair, model: LexiconModel,
               reverse_model: Optional[LexiconModel] = None) -> float:
    """Mean best-translation probability of target words given the source.

    With ``reverse_model`` (trained target->source) the score is the
    geometric mean of both directions.
    """
    src, tgt = pair.source_tokens, pair.target_tokens
    if not src or not tgt:
        raise EmptySide("similarity needs non-empty source and target")
    score = _coverage(tgt, src, model)
    if reverse_model is not None:
        score = math.sqrt(score * _coverage(src, tgt, reverse_model))
    return min(score, 1.0)


def filter_similarity(pairs: Sequence[SentencePair], model: LexiconModel, threshold: float,
                      reverse_model: Optional[LexiconModel] = None) -> List[SentencePair]:
    """Keep pairs scoring at least ``threshold``; pairs with an empty side are dropped."""
    return [p for p in pairs
            if p.source_tokens and p.target_tokens
            and similarity(p, model, reverse_model) >= threshold]
