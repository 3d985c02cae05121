"""Written English -> ASR-output style ("spoken form") text.

Spoken form is lowercase, carries no punctuation except apostrophes inside
words, and spells numerals out as cardinals::

    >>> normalize_written_to_spoken("It's 2 PM.")
    ["it's", 'two', 'pm']
"""

import re
from typing import List, Sequence

from .errors import NotANumber, TooLarge

ONES = ["zero", "one", "two", "three", "four", "five", "six", "seven", "eight",
        "nine", "ten", "eleven", "twelve", "thirteen", "fourteen", "fifteen",
        "sixteen", "seventeen", "eighteen", "nineteen"]
TENS = ["", "", "twenty", "thirty", "forty", "fifty", "sixty", "seventy",
        "eighty", "ninety"]
SCALES = ["", "thousand", "million", "billion", "trillion"]

LIMIT = 10 ** 15

_NUMERAL = re.compile(r"[0-9]+(?:\.[0-9]+)?")
_GROUPED = re.compile(r"(?<![0-9.,])[0-9]{1,3}(?:,[0-9]{3})+(?![0-9]|,[0-9])")


def _below_thousand(n: int) -> List[str]:
    words = []
    hundreds, rest = divmod(n, 100)
    if hundreds:
        words += [ONES[hundreds], "hundred"]
    if rest >= 20:
        words.append(TENS[rest // 10])
        if rest % 10:
            words.append(ONES[rest % 10])
    elif rest:
        words.append(ONES[rest])
    return words


def _integer_words(n: int) -> List[str]:
    if n == 0:
        return ["zero"]
    words = []
    groups = []
    while n:
        n, g = divmod(n, 1000)
        groups.append(g)
    for scale in range(len(groups) - 1, -1, -1):
        g = groups[scale]
        if g:
            words += _below_thousand(g)
            if SCALES[scale]:
                words.append(SCALES[scale])
    return words


def number_to_words(numeral: str) -> str:
    """Spell out an integer or single-point decimal, e.g. ``"2.5"`` -> ``"two point five"``.

    No hyphens and no "and": 101 is "one hundred one".
    """
    if not isinstance(numeral, str) or not _NUMERAL.fullmatch(numeral):
        raise NotANumber(f"not a numeral: {numeral!r}")
    whole, _, frac = numeral.partition(".")
    value = int(whole)
    if value >= LIMIT:
        raise TooLarge(f"integer part {whole} >= 10^15")
    words = _integer_words(value)
    if frac:
        words.append("point")
        words += [ONES[int(d)] for d in frac]
    return " ".join(words)


def _spell(match: re.Match) -> str:
    text = match.group(0)
    try:
        spoken = number_to_words(text)
    except TooLarge:
        # read oversized digit strings digit by digit
        spoken = " ".join("point" if c == "." else ONES[int(c)] for c in text)
    return f" {spoken} "


def _is_letter(ch: str) -> bool:
    return ch.isalpha()


def normalize_written_to_spoken(text: str) -> List[str]:
    """Lowercase, spell out numerals, drop punctuation; return spoken-form tokens.

    Thousands separators ("1,000") are folded before expansion. Digit runs
    glued to letters are split off and spelled as cardinals ("3d" -> "three
    d"). Apostrophes survive only between two letters. Every other
    non-letter character becomes a token break.
    """
    text = text.lower().replace("’", "'")
    text = _GROUPED.sub(lambda m: m.group(0).replace(",", ""), text)
    text = _NUMERAL.sub(_spell, text)
    out = []
    n = len(text)
    for i, ch in enumerate(text):
        if _is_letter(ch):
            out.append(ch)
        elif ch == "'" and 0 < i < n - 1 and _is_letter(text[i - 1]) and _is_letter(text[i + 1]):
            out.append(ch)
        else:
            out.append(" ")
    return "".join(out).split()


def is_spoken_form(tokens: Sequence[str]) -> bool:
    for tok in tokens:
        if not isinstance(tok, str) or not tok or tok != tok.lower():
            return False
        for i, ch in enumerate(tok):
            if _is_letter(ch):
                continue
            if ch == "'" and 0 < i < len(tok) - 1 and _is_letter(tok[i - 1]) and _is_letter(tok[i + 1]):
                continue
            return False
    return True
