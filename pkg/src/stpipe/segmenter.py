"""Sentence re-segmentation of unpunctuated token streams.

A logistic boundary classifier over a token window scores every gap
between tokens; :func:`segment` then picks the cut set with the best total
log-probability under segment-length limits by exact dynamic programming.
"""

import math
from dataclasses import dataclass
from typing import Dict, Iterable, List, Sequence, Tuple

import numpy as np

from . import kernels
from .errors import DegenerateLabels, Infeasible, StpipeError
from .textnorm import normalize_written_to_spoken

BOUNDARY_MARKS = ".!?"
_TRAILING = "\"')]}»”’"
PAD_LEFT = "<s>"
PAD_RIGHT = "</s>"


@dataclass(frozen=True)
class BoundaryExample:
    left: Tuple[str, ...]
    right: Tuple[str, ...]
    label: bool

    def features(self) -> List[str]:
        w = len(self.left)
        feats = [f"{i - w}={tok}" for i, tok in enumerate(self.left)]
        feats += [f"+{i}={tok}" for i, tok in enumerate(self.right)]
        return feats


def window(tokens: Sequence[str], pos: int, w: int) -> Tuple[Tuple[str, ...], Tuple[str, ...]]:
    """Context around the gap before ``tokens[pos]``, padded at the edges."""
    left = tuple(tokens[i] if i >= 0 else PAD_LEFT for i in range(pos - w, pos))
    right = tuple(tokens[i] if i < len(tokens) else PAD_RIGHT for i in range(pos, pos + w))
    return left, right


def _ends_sentence(word: str) -> bool:
    return word.rstrip(_TRAILING)[-1:] in tuple(BOUNDARY_MARKS)


def spoken_with_boundaries(paragraph: str) -> Tuple[List[str], List[bool]]:
    """Normalize a punctuated paragraph, keeping a boundary flag per spoken token."""
    tokens: List[str] = []
    flags: List[bool] = []
    for word in paragraph.split():
        spoken = normalize_written_to_spoken(word)
        tokens += spoken
        flags += [False] * len(spoken)
        if _ends_sentence(word) and flags:
            # a bare "." attaches to the previous spoken token
            flags[-1] = True
    return tokens, flags


def extract_training_examples(paragraphs: Iterable[str], w: int) -> List[BoundaryExample]:
    if w < 1:
        raise StpipeError("window width must be >= 1")
    examples = []
    for para in paragraphs:
        tokens, flags = spoken_with_boundaries(para)
        for pos in range(1, len(tokens)):
            left, right = window(tokens, pos, w)
            examples.append(BoundaryExample(left, right, flags[pos - 1]))
    return examples


@dataclass
class BoundaryModel:
    weights: Dict[str, float]
    bias: float
    window: int
    loss_history: Tuple[float, ...] = ()

    def score(self, left, right) -> float:
        ex = BoundaryExample(tuple(left), tuple(right), False)
        return self.bias + sum(self.weights.get(f, 0.0) for f in ex.features())

    def predict(self, left, right) -> float:
        z = self.score(left, right)
        p = 1.0 / (1.0 + math.exp(-z)) if z >= 0 else math.exp(z) / (1.0 + math.exp(z))
        return min(max(p, 1e-15), 1.0 - 1e-15)

    def gap_logprobs(self, tokens: Sequence[str]) -> Tuple[np.ndarray, np.ndarray]:
        """Log p(boundary) / log p(no boundary) for gaps after tokens 1..n-1 (index 0 unused)."""
        n = len(tokens)
        z = np.zeros(n)
        for pos in range(1, n):
            z[pos] = self.score(*window(tokens, pos, self.window))
        return -np.logaddexp(0.0, -z), -np.logaddexp(0.0, z)

    def to_lines(self) -> str:
        lines = [f"bias\t{self.bias!r}\n", f"window\t{self.window}\n"]
        lines += [f"{k}\t{v!r}\n" for k, v in sorted(self.weights.items())]
        return "".join(lines)

    @classmethod
    def from_lines(cls, lines: Iterable[str]) -> "BoundaryModel":
        bias = None
        w = None
        weights = {}
        for lineno, line in enumerate(lines, 1):
            line = line.rstrip("\n")
            if not line:
                continue
            key, sep, value = line.rpartition("\t")
            if not sep:
                raise StpipeError(f"model line {lineno}: expected feature<TAB>value")
            if key == "bias" and bias is None:
                bias = float(value)
            elif key == "window" and w is None:
                w = int(value)
            else:
                weights[key] = float(value)
        if bias is None or w is None:
            raise StpipeError("model file lacks bias or window header")
        return cls(weights, bias, w)


def train_boundary_model(examples: Sequence[BoundaryExample], epochs: int = 10,
                         learning_rate: float = 0.5, seed: int = 0) -> BoundaryModel:
    """Logistic regression by seeded SGD over one fixed shuffle.

    The step size decays as ``learning_rate / (1 + epoch)``. The model's
    ``loss_history`` records the mean training log-loss after each epoch.
    """
    labels = {ex.label for ex in examples}
    if labels != {True, False}:
        raise DegenerateLabels("training data needs both boundary and non-boundary examples")
    if epochs < 1:
        raise StpipeError("epochs must be >= 1")
    w = len(examples[0].left)

    index: Dict[str, int] = {}
    feat_idx: List[int] = []
    feat_ptr = [0]
    for ex in examples:
        feat_idx += [index.setdefault(f, len(index)) for f in ex.features()]
        feat_ptr.append(len(feat_idx))
    feat_idx_a = np.asarray(feat_idx, dtype=np.int64)
    feat_ptr_a = np.asarray(feat_ptr, dtype=np.int64)
    y = np.asarray([1.0 if ex.label else 0.0 for ex in examples])

    order = np.random.default_rng(seed).permutation(len(examples)).astype(np.int64)
    weights = np.zeros(len(index))
    bias = 0.0
    history = []
    for epoch in range(epochs):
        bias = kernels.sgd_epoch(weights, bias, feat_idx_a, feat_ptr_a, y, order,
                                 learning_rate / (1.0 + epoch))
        history.append(float(kernels.logloss(weights, bias, feat_idx_a, feat_ptr_a, y)))
    names = list(index)
    return BoundaryModel({names[i]: float(weights[i]) for i in range(len(names))},
                         float(bias), w, tuple(history))


def best_cuts(log_b: np.ndarray, log_nb: np.ndarray, min_len: int, max_len: int) -> List[int]:
    """Optimal interior cut positions for ``len(log_b)`` tokens.

    ``log_b[p]`` / ``log_nb[p]`` score the gap after token ``p`` (1-based;
    index 0 ignored). Every segment length must lie in [min_len, max_len];
    only when that is impossible may the last segment be shorter. Ties go to
    fewer segments, then to the lexicographically leftmost cuts.
    """
    if min_len < 1 or max_len < min_len:
        raise Infeasible(f"need 1 <= min_len <= max_len, got {min_len}, {max_len}")
    n = len(log_b)
    if n == 0:
        return []
    gain = np.asarray(log_b, dtype=np.float64) - np.asarray(log_nb, dtype=np.float64)
    gain[0] = 0.0
    back, ok = kernels.segment_dp(gain, n, min_len, max_len, False)
    if not ok:
        back, ok = kernels.segment_dp(gain, n, min_len, max_len, True)
    cuts = []
    pos = int(back[n])
    while pos > 0:
        cuts.append(pos)
        pos = int(back[pos])
    return cuts[::-1]


def objective(log_b, log_nb, cuts) -> float:
    """Total log-probability of a cut set (cuts at gaps 1..n-1)."""
    chosen = set(cuts)
    return float(sum(log_b[p] if p in chosen else log_nb[p] for p in range(1, len(log_b))))


def segment(tokens: Sequence[str], model: BoundaryModel, min_len: int = 1,
            max_len: int = 50) -> List[List[str]]:
    tokens = list(tokens)
    if not tokens:
        if min_len < 1 or max_len < min_len:
            raise Infeasible(f"need 1 <= min_len <= max_len, got {min_len}, {max_len}")
        return []
    log_b, log_nb = model.gap_logprobs(tokens)
    cuts = best_cuts(log_b, log_nb, min_len, max_len)
    edges = [0, *cuts, len(tokens)]
    return [tokens[edges[i]:edges[i + 1]] for i in range(len(edges) - 1)]
