"""N-best merging, log-linear rescoring with a length penalty, and grid-search weight tuning.

All model scores are log-domain, higher is better.
"""

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from .errors import GridEmpty, IdMismatch, MalformedLine, MissingScore, RefMismatch, StpipeError
from .metrics import bleu_corpus

SEP = " ||| "
IMPUTE_WORST = "impute_worst"
DROP = "drop"


@dataclass
class Hypothesis:
    tokens: Tuple[str, ...]
    scores: Dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        self.tokens = tuple(self.tokens)
        if not self.tokens:
            raise StpipeError("hypothesis has no tokens")
        for name, value in self.scores.items():
            if not math.isfinite(value):
                raise StpipeError(f"score {name}={value} is not finite")


@dataclass
class NBestList:
    sent_id: str
    hypotheses: List[Hypothesis] = field(default_factory=list)


@dataclass
class WeightVector:
    weights: Dict[str, float]
    alpha: float = 0.0

    def __post_init__(self):
        if not any(w != 0 for w in self.weights.values()):
            raise StpipeError("weight vector needs at least one nonzero weight")

    def to_lines(self) -> str:
        lines = [f"{m}\t{w!r}\n" for m, w in self.weights.items()]
        return "".join(lines) + f"alpha\t{self.alpha!r}\n"

    @classmethod
    def from_lines(cls, lines: Iterable[str]) -> "WeightVector":
        weights = {}
        alpha = 0.0
        for lineno, line in enumerate(lines, 1):
            if not line.strip():
                continue
            parts = line.split()
            if len(parts) != 2:
                raise MalformedLine(f"weights line {lineno}: expected model<TAB>weight")
            try:
                value = float(parts[1])
            except ValueError:
                raise MalformedLine(f"weights line {lineno}: {parts[1]!r} is not a number") from None
            if parts[0] == "alpha":
                alpha = value
            else:
                weights[parts[0]] = value
        return cls(weights, alpha)


def _parse_scores(field_text: str, lineno: int) -> Dict[str, float]:
    scores = {}
    for item in field_text.split():
        name, eq, value = item.partition("=")
        if not eq or not name:
            raise MalformedLine(f"line {lineno}: score {item!r} is not name=value")
        try:
            v = float(value)
        except ValueError:
            raise MalformedLine(f"line {lineno}: score {item!r} is not numeric") from None
        if not math.isfinite(v):
            raise MalformedLine(f"line {lineno}: score {item!r} is not finite")
        scores[name] = v
    return scores


def parse_nbest(lines: Iterable[str]) -> List[NBestList]:
    """Read ``sent_id ||| tokens ||| name=value ...`` lines, grouped by id in first-seen order."""
    lists: Dict[str, NBestList] = {}
    index: Dict[Tuple[str, Tuple[str, ...]], Hypothesis] = {}
    for lineno, line in enumerate(lines, 1):
        line = line.rstrip("\n")
        if not line.strip():
            continue
        parts = line.split(SEP)
        if len(parts) != 3:
            raise MalformedLine(f"line {lineno}: expected 3 ' ||| '-separated fields, got {len(parts)}")
        sent_id = parts[0].strip()
        tokens = tuple(parts[1].split())
        if not sent_id or not tokens:
            raise MalformedLine(f"line {lineno}: empty sentence id or hypothesis")
        scores = _parse_scores(parts[2], lineno)
        key = (sent_id, tokens)
        if key in index:
            index[key].scores.update(scores)
            continue
        hyp = Hypothesis(tokens, scores)
        index[key] = hyp
        lists.setdefault(sent_id, NBestList(sent_id)).hypotheses.append(hyp)
    return list(lists.values())


def _fmt(v: float) -> str:
    return repr(float(v))


def format_nbest(lists: Iterable[NBestList]) -> str:
    out = []
    for nb in lists:
        for h in nb.hypotheses:
            scores = " ".join(f"{k}={_fmt(v)}" for k, v in h.scores.items())
            out.append(f"{nb.sent_id}{SEP}{' '.join(h.tokens)}{SEP}{scores}\n")
    return "".join(out)


def merge_nbest(lists: Sequence[NBestList], missing_score_policy: str = IMPUTE_WORST) -> NBestList:
    """Union hypotheses of several lists for one sentence, keyed by token sequence.

    Score maps are unioned (later lists win on conflicts). A hypothesis
    lacking some model's score is dropped, or gets that model's worst score
    in the merged list, depending on ``missing_score_policy``.
    """
    if not lists:
        raise IdMismatch("nothing to merge")
    if missing_score_policy not in (IMPUTE_WORST, DROP):
        raise StpipeError(f"unknown missing-score policy {missing_score_policy!r}")
    sent_id = lists[0].sent_id
    merged: Dict[Tuple[str, ...], Hypothesis] = {}
    for nb in lists:
        if nb.sent_id != sent_id:
            raise IdMismatch(f"cannot merge sentence {nb.sent_id!r} into {sent_id!r}")
        for h in nb.hypotheses:
            if h.tokens in merged:
                merged[h.tokens].scores.update(h.scores)
            else:
                merged[h.tokens] = Hypothesis(h.tokens, dict(h.scores))
    hyps = list(merged.values())
    models = []
    for h in hyps:
        for m in h.scores:
            if m not in models:
                models.append(m)
    if missing_score_policy == DROP:
        hyps = [h for h in hyps if all(m in h.scores for m in models)]
    else:
        for m in models:
            worst = min(h.scores[m] for h in hyps if m in h.scores)
            for h in hyps:
                h.scores.setdefault(m, worst)
    return NBestList(sent_id, hyps)


def merge_all(groups: Sequence[Sequence[NBestList]], missing_score_policy: str = IMPUTE_WORST) -> List[NBestList]:
    """Merge several systems' n-best files sentence by sentence (ids in first-seen order)."""
    by_id: Dict[str, List[NBestList]] = {}
    for group in groups:
        for nb in group:
            by_id.setdefault(nb.sent_id, []).append(nb)
    return [merge_nbest(v, missing_score_policy) for v in by_id.values()]


def length_penalty(length: int, alpha: float) -> float:
    if length < 1:
        raise StpipeError("length must be >= 1")
    return ((5.0 + length) / 6.0) ** alpha


def combined_scores(nbest: NBestList, w: WeightVector) -> np.ndarray:
    models = [m for m, v in w.weights.items() if v != 0]
    matrix = np.empty((len(nbest.hypotheses), len(models)))
    lp = np.empty(len(nbest.hypotheses))
    for i, h in enumerate(nbest.hypotheses):
        for j, m in enumerate(models):
            if m not in h.scores:
                raise MissingScore(f"sentence {nbest.sent_id}: hypothesis lacks score {m!r}")
            matrix[i, j] = h.scores[m]
        lp[i] = length_penalty(len(h.tokens), w.alpha)
    weights = np.array([w.weights[m] for m in models])
    return (matrix * weights).sum(axis=1) / lp


def rescore(nbest: NBestList, w: WeightVector) -> NBestList:
    """Sort hypotheses by combined log-linear score, best first; ties keep input order."""
    if not nbest.hypotheses:
        return NBestList(nbest.sent_id, [])
    combined = combined_scores(nbest, w)
    order = np.argsort(-combined, kind="stable")
    return NBestList(nbest.sent_id, [nbest.hypotheses[i] for i in order])


def top1(nbest: NBestList, w: WeightVector) -> List[str]:
    if not nbest.hypotheses:
        return []
    combined = combined_scores(nbest, w)
    return list(nbest.hypotheses[int(np.argmax(combined))].tokens)


def grid_points(grid: Mapping[str, Sequence[float]], alphas: Sequence[float]):
    """Grid in lexicographic order: models in mapping order, each model's values as listed, alpha last."""
    models = list(grid)
    for combo in itertools.product(*[list(grid[m]) for m in models], list(alphas)):
        weights = dict(zip(models, combo[:-1]))
        if any(v != 0 for v in weights.values()):
            yield WeightVector(weights, combo[-1])


def tune_weights_grid(dev: Sequence[NBestList], refs, grid: Mapping[str, Sequence[float]],
                      alphas: Sequence[float] = (0.0,), workers: int = 1) -> WeightVector:
    """Exhaustive grid search for the weights maximizing corpus BLEU of top-1 outputs.

    ``refs`` is a list aligned with ``dev`` or a mapping from sentence id to
    reference tokens. The first grid point reaching the best BLEU wins.
    """
    if not grid or any(len(v) == 0 for v in grid.values()) or len(alphas) == 0:
        raise GridEmpty("grid and alpha list must be non-empty")
    if isinstance(refs, Mapping):
        missing = [nb.sent_id for nb in dev if nb.sent_id not in refs]
        if missing:
            raise RefMismatch(f"no reference for sentence ids {missing[:5]}")
        ref_list = [list(refs[nb.sent_id]) for nb in dev]
    else:
        ref_list = [list(r) for r in refs]
        if len(ref_list) != len(dev):
            raise RefMismatch(f"{len(ref_list)} references for {len(dev)} n-best lists")
    points = list(grid_points(grid, alphas))
    if not points:
        raise GridEmpty("every grid point has all-zero weights")

    def evaluate(w):
        return bleu_corpus(ref_list, [top1(nb, w) for nb in dev]).bleu

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            scores = list(pool.map(evaluate, points))
    else:
        scores = [evaluate(w) for w in points]
    best = 0
    for i, s in enumerate(scores):
        if s > scores[best]:
            best = i
    return points[best]
