"""Words in the parabolic generators L and R.

Words are plain strings over ``{"L", "R"}``.  Substituting

    L = [[1, 1], [0, 1]],    R = [[1, 0], [1, 1]]

turns a word into a matrix in SL(2, Z) with nonnegative entries; its trace
gives the length ``2 acosh(tr / 2)`` of the corresponding closed geodesic.
"""

from __future__ import annotations

import math
from typing import Iterator, NamedTuple, Optional

LETTERS = ("L", "R")


class TraceMatrix(NamedTuple):
    a: int
    b: int
    c: int
    d: int
    saturated: bool = False

    @property
    def trace(self) -> int:
        return self.a + self.d

    @property
    def det(self) -> int:
        return self.a * self.d - self.b * self.c


IDENTITY = TraceMatrix(1, 0, 0, 1)


def check_word(w: str) -> str:
    if not isinstance(w, str) or any(ch not in "LR" for ch in w):
        raise ValueError(f"not a word in L and R: {w!r}")
    return w


def times_letter(a: int, b: int, c: int, d: int, letter: str):
    """Right-multiply ``[[a, b], [c, d]]`` by L or R."""
    if letter == "L":
        return a, a + b, c, c + d
    return a + b, b, c + d, d


def word_matrix(w: str, cap: Optional[int] = None) -> TraceMatrix:
    """Ordered product of the letter matrices of ``w``.

    With a ``cap`` the result is flagged ``saturated`` once an entry exceeds
    it, and entries are clamped to ``cap``.  Clamped matrices are only good
    for threshold comparisons.
    """
    check_word(w)
    if cap is not None and cap < 3:
        raise ValueError("cap must be at least 3")
    a, b, c, d = 1, 0, 0, 1
    for ch in w:
        a, b, c, d = times_letter(a, b, c, d, ch)
    if cap is not None and max(a, b, c, d) > cap:
        return TraceMatrix(min(a, cap), min(b, cap), min(c, cap), min(d, cap), True)
    return TraceMatrix(a, b, c, d)


def trace(w: str, cap: Optional[int] = None) -> int:
    """Trace of ``w``.

    When ``cap`` is given the value is ``min(tr(w), cap)``: a result equal to
    ``cap`` means "at least cap", anything smaller is exact.
    """
    check_word(w)
    a, b, c, d = 1, 0, 0, 1
    for ch in w:
        a, b, c, d = times_letter(a, b, c, d, ch)
    t = a + d
    return t if cap is None else min(t, cap)


def geodesic_length(t: int | float) -> float:
    """Hyperbolic length ``2 acosh(t/2)`` of a closed geodesic of trace ``t``."""
    if t < 2:
        raise ValueError(f"trace {t} < 2 does not belong to a geodesic")
    return 2.0 * math.acosh(t / 2.0)


def length_to_trace_bound(length: float) -> int:
    """Largest integer trace whose geodesic is not longer than ``length``."""
    t = int(math.floor(2.0 * math.cosh(length / 2.0))) + 1
    # float guard: step down until the bound is exact
    while t >= 2 and geodesic_length(t) > length:
        t -= 1
    return t


def power_word(w: str, k: int) -> str:
    if k < 1:
        raise ValueError("power must be at least 1")
    return check_word(w) * k


def canonical_cyclic_form(w: str) -> str:
    """Lexicographically least rotation of ``w``."""
    check_word(w)
    if not w:
        raise ValueError("empty word has no cyclic form")
    return min(w[i:] + w[:i] for i in range(len(w)))


def is_pure(w: str) -> bool:
    return len(set(w)) <= 1


def _trace_bounded_words(hi: int) -> Iterator[tuple[str, int]]:
    # DFS over all words whose trace can still end up <= hi.  Mixed prefixes
    # only grow in trace; a pure run L^a forces trace >= a + 2 on any mixed
    # extension.
    stack = [("", 1, 0, 0, 1)]
    while stack:
        w, a, b, c, d = stack.pop()
        for ch in LETTERS:
            na, nb, nc, nd = times_letter(a, b, c, d, ch)
            nw = w + ch
            t = na + nd
            if t == 2:
                # pure run of length len(nw)
                if len(nw) + 2 <= hi:
                    stack.append((nw, na, nb, nc, nd))
                continue
            if t > hi:
                continue
            yield nw, t
            stack.append((nw, na, nb, nc, nd))


def enumerate_words_trace_between(lo: int = 3, hi: int = 3) -> list[str]:
    """All words ``w`` with ``lo <= tr(w) <= hi``, sorted by (length, word).

    Mixed words of ``k`` letters have trace at least ``k + 1``, so the search
    never goes deeper than ``hi - 1`` letters.
    """
    if lo < 3:
        raise ValueError("lo must be at least 3")
    if hi < lo:
        return []
    out = [w for w, t in _trace_bounded_words(hi) if t >= lo]
    out.sort(key=lambda w: (len(w), w))
    return out


def trace_histogram(hi: int) -> list[int]:
    """``h[t]`` = number of words of trace exactly ``t``, for ``3 <= t <= hi``."""
    hist = [0] * (hi + 1)
    for _, t in _trace_bounded_words(hi):
        hist[t] += 1
    return hist
