"""Simulated ASR errors on spoken-form text.

Each token gets one uniform draw, partitioned by the configured rates into
homophone swap / random substitution / deletion / insertion-after /
identity, so expected error counts are just ``rate * n_tokens``.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence

import numpy as np

from .corpusops import SentencePair
from .errors import StpipeError
from .textnorm import is_spoken_form, normalize_written_to_spoken


class HomophoneTable(dict):
    """word -> list of confusable words."""

    def __init__(self, entries: Optional[Dict[str, List[str]]] = None):
        super().__init__()
        for word, alts in (entries or {}).items():
            alts = list(alts)
            if not alts:
                raise StpipeError(f"homophone entry {word!r} has no alternatives")
            if not is_spoken_form([word, *alts]):
                raise StpipeError(f"homophone entry {word!r} is not spoken form")
            if word in alts:
                raise StpipeError(f"homophone entry {word!r} maps to itself")
            self[word] = alts

    @classmethod
    def from_lines(cls, lines: Iterable[str]) -> "HomophoneTable":
        entries = {}
        for lineno, line in enumerate(lines, 1):
            line = line.strip("\n")
            if not line.strip():
                continue
            if "\t" not in line:
                raise StpipeError(f"homophone line {lineno}: expected word<TAB>alternatives")
            word, alts = line.split("\t", 1)
            entries.setdefault(word.strip(), []).extend(alts.split())
        return cls(entries)


@dataclass
class CorruptionConfig:
    homophone_rate: float = 0.0
    sub_rate: float = 0.0
    del_rate: float = 0.0
    ins_rate: float = 0.0
    vocab: List[str] = field(default_factory=list)
    seed: int = 0

    def __post_init__(self):
        rates = (self.homophone_rate, self.sub_rate, self.del_rate, self.ins_rate)
        if any(not (0.0 <= r <= 1.0) for r in rates):
            raise StpipeError("corruption rates must lie in [0, 1]")
        if sum(rates) > 1.0 + 1e-12:
            raise StpipeError("corruption rates sum to more than 1")
        if (self.sub_rate > 0 or self.ins_rate > 0) and not self.vocab:
            raise StpipeError("vocab required when sub_rate or ins_rate > 0")
        if not is_spoken_form(self.vocab):
            raise StpipeError("vocab must be spoken-form tokens")

    @property
    def edges(self):
        return np.cumsum([self.homophone_rate, self.sub_rate, self.del_rate, self.ins_rate])


def corrupt(tokens: Sequence[str], table: HomophoneTable, config: CorruptionConfig,
            rng: Optional[np.random.Generator] = None) -> List[str]:
    """Apply one seeded error draw per token.

    ``rng`` defaults to a generator seeded with ``config.seed``. A token
    landing in the homophone band without a table entry is left unchanged.
    """
    if rng is None:
        rng = np.random.default_rng(config.seed)
    h, s, d, i = config.edges
    out = []
    for tok in tokens:
        u = rng.random()
        if u < h:
            alts = table.get(tok)
            out.append(alts[rng.integers(len(alts))] if alts else tok)
        elif u < s:
            out.append(config.vocab[rng.integers(len(config.vocab))])
        elif u < d:
            continue
        elif u < i:
            out.append(tok)
            out.append(config.vocab[rng.integers(len(config.vocab))])
        else:
            out.append(tok)
    return out


def pair_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, index]))


def augment_bitext(pairs: Sequence[SentencePair], table: HomophoneTable, config: CorruptionConfig,
                   workers: int = 1) -> List[SentencePair]:
    """Replace each source with corrupted spoken form; targets pass through untouched."""

    def one(idx):
        p = pairs[idx]
        spoken = normalize_written_to_spoken(p.source)
        noisy = corrupt(spoken, table, config, pair_rng(config.seed, idx))
        return SentencePair(" ".join(noisy), p.target, p.id)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(one, range(len(pairs))))
    return [one(i) for i in range(len(pairs))]
