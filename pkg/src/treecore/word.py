"""Reduced words in a free group of fixed rank.

A word is a tuple of nonzero ints: ``i`` stands for the i-th basis letter and
``-i`` for its inverse.  Everything downstream passes words around as plain
tuples, so they are hashable and cheap to invert.
"""
from __future__ import annotations

import string
from functools import lru_cache
from typing import Iterable, Sequence, Tuple

Word = Tuple[int, ...]

EMPTY: Word = ()

_LOWER = string.ascii_lowercase


class WordError(ValueError):
    pass


def check_letters(letters: Iterable[int], rank: int) -> None:
    for x in letters:
        if x == 0 or abs(x) > rank:
            raise WordError(f"invalid generator index {x} for rank {rank}")


def reduce(letters: Iterable[int], rank: int | None = None) -> Word:
    """Freely reduce a letter sequence."""
    letters = list(letters)
    if rank is not None:
        check_letters(letters, rank)
    out: list[int] = []
    for x in letters:
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


def multiply(*words: Sequence[int]) -> Word:
    out: list[int] = []
    for w in words:
        for x in w:
            if out and out[-1] == -x:
                out.pop()
            else:
                out.append(x)
    return tuple(out)


def inverse(w: Sequence[int]) -> Word:
    return tuple(-x for x in reversed(w))


def power(w: Sequence[int], k: int) -> Word:
    if k < 0:
        w, k = inverse(w), -k
    return multiply(*([w] * k)) if k else EMPTY


def conjugate(w: Sequence[int], g: Sequence[int]) -> Word:
    """Return g w g^-1."""
    return multiply(g, w, inverse(g))


def is_reduced(w: Sequence[int]) -> bool:
    return all(w[i] != -w[i + 1] for i in range(len(w) - 1))


def cyclic_reduce(w: Sequence[int]) -> tuple[Word, Word]:
    """Split ``w`` as ``conj * core * conj^-1`` with ``core`` cyclically reduced."""
    w = reduce(w)
    i, j = 0, len(w) - 1
    while i < j and w[i] == -w[j]:
        i += 1
        j -= 1
    return tuple(w[i:j + 1]), tuple(w[:i])


def letter_key(x: int) -> tuple[int, bool]:
    # a < A < b < B < ...
    return (abs(x), x < 0)


def shortlex_key(w: Sequence[int]) -> tuple:
    return (len(w), tuple(letter_key(x) for x in w))


@lru_cache(maxsize=None)
def letters(rank: int) -> tuple[int, ...]:
    """All 2*rank signed letters in canonical order."""
    return tuple(sorted([i for i in range(1, rank + 1)] + [-i for i in range(1, rank + 1)],
                  key=letter_key))


def parse(s: str, rank: int | None = None) -> Word:
    """Parse ``"abA"`` style strings; ``"1"`` and ``""`` are the identity."""
    s = s.strip()
    if s in ("", "1"):
        return EMPTY
    out = []
    for ch in s:
        if ch.islower():
            out.append(_LOWER.index(ch) + 1)
        elif ch.isupper():
            out.append(-(_LOWER.index(ch.lower()) + 1))
        else:
            raise WordError(f"bad character {ch!r} in word {s!r}")
    return reduce(out, rank)


def format_word(w: Sequence[int]) -> str:
    if not w:
        return "1"
    return "".join(_LOWER[x - 1] if x > 0 else _LOWER[-x - 1].upper() for x in w)
