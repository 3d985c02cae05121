"""Brute-force reference implementations used only by the tests.

None of these share code with the package; they enumerate or recurse
directly from the definitions.
"""

import itertools
import math
from functools import lru_cache


def edit_distance_recursive(a, b):
    a = tuple(a)
    b = tuple(b)

    @lru_cache(maxsize=None)
    def d(i, j):
        if i == len(a):
            return len(b) - j
        if j == len(b):
            return len(a) - i
        if a[i] == b[j]:
            return d(i + 1, j + 1)
        return 1 + min(d(i + 1, j), d(i, j + 1), d(i + 1, j + 1))

    return d(0, 0)


def mwer_bruteforce(hyp, refs):
    """Minimum total edit distance over every split of ``hyp`` into len(refs) pieces (empties allowed)."""
    n = len(hyp)
    k = len(refs)
    best = None
    best_cuts = None
    for cuts in itertools.combinations_with_replacement(range(n + 1), k - 1):
        edges = (0, *cuts, n)
        cost = sum(edit_distance_recursive(refs[i], hyp[edges[i]:edges[i + 1]]) for i in range(k))
        if best is None or cost < best:
            best, best_cuts = cost, cuts
    return best, best_cuts


_SMALL = ("zero one two three four five six seven eight nine ten eleven twelve thirteen "
          "fourteen fifteen sixteen seventeen eighteen nineteen").split()
_DECADES = {2: "twenty", 3: "thirty", 4: "forty", 5: "fifty", 6: "sixty", 7: "seventy",
            8: "eighty", 9: "ninety"}


def _build_table():
    table = list(_SMALL)
    for tens in range(2, 10):
        table.append(_DECADES[tens])
        for unit in range(1, 10):
            table.append(_DECADES[tens] + " " + _SMALL[unit])
    assert len(table) == 100
    return table


TABLE_0_99 = _build_table()


def cardinal_0_9999(n):
    """Words for 0 <= n <= 9999 from a literal 0..99 table."""
    assert 0 <= n <= 9999
    if n == 0:
        return "zero"
    thousands, hundreds, rest = n // 1000, (n // 100) % 10, n % 100
    parts = []
    if thousands:
        parts.append(TABLE_0_99[thousands] + " thousand")
    if hundreds:
        parts.append(TABLE_0_99[hundreds] + " hundred")
    if rest:
        parts.append(TABLE_0_99[rest])
    return " ".join(parts)


def segmentation_bruteforce(log_b, log_nb, min_len, max_len):
    """Exhaustive search over all cut subsets; same feasibility and tie rules as the DP.

    Returns the preferred cut tuple and its objective. Objectives within
    ``1e-9`` count as tied (the DP sums in a different order); ties go to
    fewer cuts, then the lexicographically smallest cut tuple.
    """
    n = len(log_b)
    gaps = list(range(1, n))

    def lengths(cuts):
        edges = (0, *cuts, n)
        return [edges[i + 1] - edges[i] for i in range(len(edges) - 1)]

    def feasible(cuts, relax):
        ls = lengths(cuts)
        for i, L in enumerate(ls):
            lo = 1 if (relax and i == len(ls) - 1) else min_len
            if not (lo <= L <= max_len):
                return False
        return True

    for relax in (False, True):
        cands = []
        for r in range(len(gaps) + 1):
            for cuts in itertools.combinations(gaps, r):
                if feasible(cuts, relax):
                    obj = math.fsum(log_b[p] if p in cuts else log_nb[p] for p in gaps)
                    cands.append((obj, cuts))
        if cands:
            best = max(o for o, _ in cands)
            tied = [c for o, c in cands if o >= best - 1e-9]
            return best, min(tied, key=lambda c: (len(c), c))
    raise AssertionError("no feasible segmentation")


def bleu_by_hand(refs, hyps, max_n=4):
    """Corpus BLEU straight from the definition with explicit n-gram lists."""
    match = [0] * max_n
    total = [0] * max_n
    c = r = 0
    for ref, hyp in zip(refs, hyps):
        c += len(hyp)
        r += len(ref)
        for n in range(1, max_n + 1):
            hg = [tuple(hyp[i:i + n]) for i in range(len(hyp) - n + 1)]
            rg = [tuple(ref[i:i + n]) for i in range(len(ref) - n + 1)]
            total[n - 1] += len(hg)
            for g in set(hg):
                match[n - 1] += min(hg.count(g), rg.count(g))
    if any(m == 0 for m in match):
        return 0.0
    bp = 1.0 if c >= r else math.exp(1 - r / c)
    return 100 * bp * math.exp(sum(math.log(m / t) for m, t in zip(match, total)) / max_n)
