"""Small finite groups with hashable tuple elements.

``SL2(p)`` elements are ``(a, b, c, d)`` for ``[[a, b], [c, d]]`` mod ``p``;
``Symmetric(n)`` elements are tuples ``x`` with ``i -> x[i]`` and the product
``x * y`` meaning "first ``y``, then ``x``".
"""

from __future__ import annotations

import itertools
import math
from functools import cached_property
from typing import Sequence

import numpy as np

Word = tuple[int, ...]


def parse_word(w) -> Word:
    """``"aaB"`` -> ``(1, 1, -2)``: lowercase letters are generators, uppercase their inverses."""
    if not isinstance(w, str):
        return tuple(int(x) for x in w)
    out = []
    for ch in w:
        if not ch.isalpha():
            raise ValueError(f"bad generator letter {ch!r}")
        i = ord(ch.lower()) - ord("a") + 1
        out.append(i if ch.islower() else -i)
    return tuple(out)


def format_word(w: Word) -> str:
    return "".join(chr(ord("a") + abs(g) - 1) if g > 0 else chr(ord("A") + abs(g) - 1) for g in w)


def is_prime(p: int) -> bool:
    return p >= 2 and all(p % q for q in range(2, int(p**0.5) + 1))


class FiniteGroup:
    name = "group"
    identity: tuple = ()
    table_limit = 2000

    def mul(self, x, y):
        raise NotImplementedError

    def inv(self, x):
        raise NotImplementedError

    def random(self, rng: np.random.Generator):
        raise NotImplementedError

    def elements(self) -> list:
        raise NotImplementedError

    def __len__(self):
        return self.order

    @property
    def order(self) -> int:
        raise NotImplementedError

    def power(self, x, k: int):
        r = self.identity
        base = x if k >= 0 else self.inv(x)
        for _ in range(abs(k)):
            r = self.mul(r, base)
        return r

    def element_order(self, x) -> int:
        k, y = 1, x
        while y != self.identity:
            y = self.mul(y, x)
            k += 1
        return k

    def evaluate(self, images: Sequence, word) -> tuple:
        """Image of a generator word under ``generator i -> images[i-1]``."""
        r = self.identity
        for g in parse_word(word):
            x = images[abs(g) - 1]
            r = self.mul(r, x if g > 0 else self.inv(x))
        return r

    def commutator(self, x, y):
        return self.mul(self.mul(x, y), self.mul(self.inv(x), self.inv(y)))

    def generated_subgroup_order(self, gens) -> int:
        seen = {self.identity}
        frontier = [self.identity]
        while frontier:
            nxt = []
            for x in frontier:
                for g in gens:
                    y = self.mul(x, g)
                    if y not in seen:
                        seen.add(y)
                        nxt.append(y)
            frontier = nxt
        return len(seen)

    # -- index form for small groups -------------------------------------

    @cached_property
    def index(self) -> dict:
        return {x: i for i, x in enumerate(self.elements())}

    @cached_property
    def table(self) -> np.ndarray:
        """Multiplication table on element indices."""
        els = self.elements()
        if len(els) > self.table_limit:
            raise ValueError(f"group of order {len(els)} is too large for a table")
        idx = self.index
        return np.array([[idx[self.mul(x, y)] for y in els] for x in els], dtype=np.int32)

    @cached_property
    def inverse_index(self) -> np.ndarray:
        idx = self.index
        return np.array([idx[self.inv(x)] for x in self.elements()], dtype=np.int32)

    @property
    def identity_index(self) -> int:
        return self.index[self.identity]


class TrivialGroup(FiniteGroup):
    name = "trivial"
    identity = ()

    def mul(self, x, y):
        return ()

    def inv(self, x):
        return ()

    def random(self, rng):
        return ()

    def elements(self):
        return [()]

    @property
    def order(self):
        return 1


class SL2(FiniteGroup):
    def __init__(self, p: int):
        if not is_prime(p):
            raise ValueError(f"{p} is not prime")
        self.p = p
        self.name = f"SL2({p})"
        self.identity = (1, 0, 0, 1)

    def mul(self, x, y):
        a, b, c, d = x
        e, f, g, h = y
        p = self.p
        return ((a * e + b * g) % p, (a * f + b * h) % p, (c * e + d * g) % p, (c * f + d * h) % p)

    def inv(self, x):
        a, b, c, d = x
        p = self.p
        return (d, (-b) % p, (-c) % p, a)

    def random(self, rng):
        p = self.p
        while True:
            a, b, c, d = (int(v) for v in rng.integers(0, p, size=4))
            if (a * d - b * c) % p == 1:
                return (a, b, c, d)

    @cached_property
    def _elements(self):
        p = self.p
        return [m for m in itertools.product(range(p), repeat=4) if (m[0] * m[3] - m[1] * m[2]) % p == 1]

    def elements(self):
        return self._elements

    @property
    def order(self):
        return self.p**3 - self.p


class Symmetric(FiniteGroup):
    table_limit = 720

    def __init__(self, n: int):
        if n < 1:
            raise ValueError("degree must be positive")
        self.n = n
        self.name = f"Sym({n})"
        self.identity = tuple(range(n))

    def mul(self, x, y):
        return tuple(x[i] for i in y)

    def inv(self, x):
        out = [0] * self.n
        for i, xi in enumerate(x):
            out[xi] = i
        return tuple(out)

    def random(self, rng):
        return tuple(int(v) for v in rng.permutation(self.n))

    def elements(self):
        return list(itertools.permutations(range(self.n)))

    @property
    def order(self):
        out = 1
        for k in range(2, self.n + 1):
            out *= k
        return out

    @staticmethod
    def fixed_points(x) -> int:
        return sum(1 for i, xi in enumerate(x) if i == xi)


def make_group(kind: str, param: int = 0) -> FiniteGroup:
    if kind == "trivial":
        return TrivialGroup()
    if kind == "sl2":
        return SL2(param)
    if kind == "sym":
        return Symmetric(param)
    raise ValueError(f"unknown group kind {kind!r}")


# -- characters --------------------------------------------------------------


def conjugacy_classes(group: FiniteGroup) -> list[list[int]]:
    """Conjugacy classes as lists of element indices; the identity class comes first."""
    els = group.elements()
    tab = group.table
    inv = group.inverse_index
    seen = np.zeros(len(els), dtype=bool)
    classes = []
    for x in [group.identity_index] + list(range(len(els))):
        if seen[x]:
            continue
        cls = np.unique(tab[tab[np.arange(len(els)), x], inv])
        seen[cls] = True
        classes.append(sorted(int(c) for c in cls))
    return classes


def character_degrees(group: FiniteGroup, seed: int = 0) -> list[int]:
    """Irreducible character degrees via simultaneous diagonalisation of class sums."""
    tab = group.table
    classes = conjugacy_classes(group)
    k = len(classes)
    class_of = np.empty(len(tab), dtype=np.int64)
    for j, cls in enumerate(classes):
        class_of[cls] = j
    reps = [cls[0] for cls in classes]
    sizes = np.array([len(c) for c in classes], dtype=float)
    # structure constants C_j C_i = sum_l a[j, i, l] C_l, counted at the representative of C_l
    a = np.zeros((k, k, k))
    for j, cj in enumerate(classes):
        for l, r in enumerate(reps):
            # pairs (x, y) with x in C_j, y in C_i, x y = r
            for x in cj:
                y = tab[group.inverse_index[x], r]
                a[j, class_of[y], l] += 1
    rng = np.random.default_rng(seed)
    coeffs = rng.standard_normal(k)
    m = np.tensordot(coeffs, a, axes=1)
    _, vecs = np.linalg.eig(m)
    degrees = []
    for v in vecs.T:
        omega = v / v[0]
        s = np.sum(np.abs(omega) ** 2 / sizes)
        degrees.append(int(round(math.sqrt(len(tab) / s.real))))
    return sorted(degrees)


def zeta_value(degrees: Sequence[int], s: int) -> float:
    return sum(d ** (-s) for d in degrees)
