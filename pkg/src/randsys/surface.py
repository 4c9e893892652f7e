"""Triangulated surfaces built from ideal triangles with zero shear.

A surface with ``F`` triangles is a partial pairing on the ``3F`` triangle
sides ("slots").  Triangle ``t`` owns slots ``3t, 3t+1, 3t+2`` in
counter-clockwise order.  The dual ribbon graph has one trivalent vertex per
triangle and one dart per slot; the cyclic order at a vertex is the slot
order, and an unglued slot is a dangling half-edge.

A path in the dual graph enters a triangle through one side and leaves
through another.  Leaving through the next side in cyclic order is a left
turn ``L``, leaving through the one after that is a right turn ``R``.  The
trace of the resulting word only depends on the closed curve, not on this
convention: swapping L and R is conjugation by ``[[0, 1], [1, 0]]``.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence, Union

from .words import geodesic_length, times_letter

UNGLUED = -1


class PairingError(ValueError):
    """Invalid gluing data; ``slot`` names the offending side when known."""

    def __init__(self, message, slot=None):
        super().__init__(message)
        self.slot = slot


class TopologyError(ValueError):
    pass


def left_exit(e: int) -> int:
    return 3 * (e // 3) + (e % 3 + 1) % 3


def right_exit(e: int) -> int:
    return 3 * (e // 3) + (e % 3 + 2) % 3


def turn_letter(entered: int, left: int) -> str:
    return "L" if left == left_exit(entered) else "R"


PairingLike = Union[Mapping[int, int], Sequence[Optional[int]], Iterable[tuple[int, int]]]


def _normalize(n_slots: int, pairing) -> list[int]:
    out = [UNGLUED] * n_slots
    if isinstance(pairing, Mapping):
        items = list(pairing.items())
    elif isinstance(pairing, Sequence) and len(pairing) == n_slots and all(
        p is None or isinstance(p, int) for p in pairing
    ):
        items = [(i, p) for i, p in enumerate(pairing) if p is not None and p != UNGLUED]
    else:
        items = [tuple(pq) for pq in pairing]
    for a, b in items:
        for s in (a, b):
            if not isinstance(s, int) or not 0 <= s < n_slots:
                raise PairingError(f"slot {s!r} out of range [0, {n_slots})", s)
        if a == b:
            raise PairingError(f"slot {a} glued to itself", a)
        for s, t in ((a, b), (b, a)):
            if out[s] not in (UNGLUED, t):
                raise PairingError(f"slot {s} glued to both {out[s]} and {t}", s)
            out[s] = t
    return out


def check_pairing(pairing: Sequence[int]) -> None:
    """Raise PairingError unless ``pairing`` is a fixed-point-free partial involution."""
    n_slots = len(pairing)
    if n_slots % 3:
        raise PairingError(f"{n_slots} slots is not a whole number of triangles")
    for s, t in enumerate(pairing):
        if t == UNGLUED:
            continue
        if not isinstance(t, int) or not 0 <= t < n_slots:
            raise PairingError(f"slot {s} glued to out-of-range {t!r}", s)
        if t == s:
            raise PairingError(f"slot {s} glued to itself", s)
        if pairing[t] != s:
            raise PairingError(f"slot {s} -> {t} but {t} -> {pairing[t]}", s)


class TriangulatedSurface:
    """Surface glued from ideal triangles, stored as a partial involution on slots.

    The object is immutable; :meth:`glue` returns a new surface.
    """

    __slots__ = ("pairing",)

    def __init__(self, pairing: Sequence[int]):
        pairing = tuple(UNGLUED if p is None else p for p in pairing)
        check_pairing(pairing)
        self.pairing = pairing

    @classmethod
    def from_pairing(cls, n: int, pairing: PairingLike = ()) -> "TriangulatedSurface":
        """Surface with ``2n`` triangles.

        ``pairing`` is a mapping ``{a: b}``, an iterable of pairs, or a list of
        length ``6n`` with ``-1``/``None`` for unglued slots.
        """
        if n < 1:
            raise PairingError("need at least one pair of triangles")
        return cls(_normalize(6 * n, pairing))

    @classmethod
    def from_triangles(cls, n_triangles: int, pairing: PairingLike = ()) -> "TriangulatedSurface":
        return cls(_normalize(3 * n_triangles, pairing))

    def __eq__(self, other):
        return isinstance(other, TriangulatedSurface) and self.pairing == other.pairing

    def __hash__(self):
        return hash(self.pairing)

    def __repr__(self):
        return f"TriangulatedSurface(triangles={self.n_triangles}, unglued={len(self.unglued())})"

    @property
    def n_slots(self) -> int:
        return len(self.pairing)

    @property
    def n_triangles(self) -> int:
        return len(self.pairing) // 3

    @property
    def n(self) -> int:
        """Half the number of triangles (the surface has area ``2 pi n``)."""
        return self.n_triangles // 2

    def unglued(self) -> list[int]:
        return [s for s, t in enumerate(self.pairing) if t == UNGLUED]

    def glued_pairs(self) -> list[tuple[int, int]]:
        return [(s, t) for s, t in enumerate(self.pairing) if t > s]

    @property
    def is_closed(self) -> bool:
        return UNGLUED not in self.pairing

    def glue(self, a: int, b: int) -> "TriangulatedSurface":
        p = list(self.pairing)
        if p[a] != UNGLUED or p[b] != UNGLUED:
            raise PairingError(f"slots {a}, {b} are not both unglued", a)
        p[a], p[b] = b, a
        return TriangulatedSurface(p)

    # -- connectivity ----------------------------------------------------

    def components(self) -> list[list[int]]:
        """Connected components as sorted lists of triangles."""
        seen = [False] * self.n_triangles
        comps = []
        for t0 in range(self.n_triangles):
            if seen[t0]:
                continue
            seen[t0] = True
            comp, queue = [], [t0]
            while queue:
                t = queue.pop()
                comp.append(t)
                for s in range(3 * t, 3 * t + 3):
                    q = self.pairing[s]
                    if q != UNGLUED and not seen[q // 3]:
                        seen[q // 3] = True
                        queue.append(q // 3)
            comps.append(sorted(comp))
        return comps

    @property
    def is_connected(self) -> bool:
        return len(self.components()) == 1

    # -- cusps -----------------------------------------------------------

    def left_walk(self, h: int) -> tuple[int, int]:
        """Follow left turns from unglued slot ``h``; return (exit slot, number of turns)."""
        return _pure_walk(self.pairing, h, left_exit)

    def right_walk(self, h: int) -> tuple[int, int]:
        return _pure_walk(self.pairing, h, right_exit)

    def lht_cycles(self) -> list[list[int]]:
        """Left-hand-turn cycles of a closed surface, as lists of entering darts.

        Each cycle goes once around a cusp.
        """
        if not self.is_closed:
            raise TopologyError("left-hand-turn cycles need a closed surface")
        return _closed_lht_cycles(self.pairing)

    def interior_cusps(self) -> int:
        """Number of cusps not on the boundary (closed LHT cycles)."""
        return len(_closed_lht_cycles(self.pairing))

    def genus_and_cusps(self) -> tuple[int, int]:
        if not self.is_closed:
            raise TopologyError("surface has boundary")
        if not self.is_connected:
            raise TopologyError("surface is not connected")
        n_tri = self.n_triangles
        cusps = len(self.lht_cycles())
        # genus from the LHT count, then cross-check against Euler: C - n = 2 - 2g
        n = n_tri / 2
        if (n + 2 - cusps) % 2:
            raise AssertionError("genus is not an integer")
        g = int((n + 2 - cusps) // 2)
        if cusps - n != 2 - 2 * g:
            raise AssertionError("Euler identity violated")
        return g, cusps

    def boundary_components(self) -> list[list[int]]:
        """Boundary cycles of unglued slots, each starting at its smallest slot.

        Consecutive entries are joined by a left-turn path around a boundary
        cusp.
        """
        seen = set()
        comps = []
        for h in self.unglued():
            if h in seen:
                continue
            cyc = [h]
            seen.add(h)
            x = self.left_walk(h)[0]
            while x != h:
                cyc.append(x)
                seen.add(x)
                x = self.left_walk(x)[0]
            comps.append(cyc)
        return comps

    # -- permutation encoding --------------------------------------------

    def permutation_pair(self) -> tuple[list[int], list[int]]:
        """``(sigma, tau)``: triangle rotation and side pairing on slots.

        ``tau`` is only a permutation when the surface is closed.
        """
        if not self.is_closed:
            raise TopologyError("permutation pair needs a closed surface")
        sigma = [left_exit(s) for s in range(self.n_slots)]
        return sigma, list(self.pairing)


def split_components(s: TriangulatedSurface) -> list[TriangulatedSurface]:
    """Each connected component as its own surface, triangles renumbered in order."""
    out = []
    for comp in s.components():
        new_index = {t: i for i, t in enumerate(comp)}
        pairing = []
        for t in comp:
            for x in range(3 * t, 3 * t + 3):
                y = s.pairing[x]
                pairing.append(UNGLUED if y == UNGLUED else 3 * new_index[y // 3] + y % 3)
        out.append(TriangulatedSurface(pairing))
    return out


def permutation_orbits(perms: Sequence[Sequence[int]], size: int) -> list[list[int]]:
    seen = [False] * size
    orbits = []
    for x0 in range(size):
        if seen[x0]:
            continue
        seen[x0] = True
        orb, stack = [], [x0]
        while stack:
            x = stack.pop()
            orb.append(x)
            for p in perms:
                y = p[x]
                if not seen[y]:
                    seen[y] = True
                    stack.append(y)
        orbits.append(sorted(orb))
    return orbits


def is_transitive(sigma, tau) -> bool:
    return len(permutation_orbits([sigma, tau], len(sigma))) == 1


def find_isomorphism(s1: TriangulatedSurface, s2: TriangulatedSurface) -> Optional[list[int]]:
    """Orientation-preserving combinatorial isomorphism ``s1 -> s2`` on slots, if any.

    Such a map commutes with the triangle rotation and the pairing.  Only
    implemented for connected surfaces (the image of slot 0 determines it).
    """
    if s1.n_slots != s2.n_slots:
        return None
    if not s1.is_connected or not s2.is_connected:
        raise TopologyError("isomorphism search needs connected surfaces")
    p1, p2 = s1.pairing, s2.pairing
    for target in range(s2.n_slots):
        f = [UNGLUED] * s1.n_slots
        f[0] = target
        stack = [0]
        ok = True
        while stack and ok:
            x = stack.pop()
            y = f[x]
            for xx, yy in ((left_exit(x), left_exit(y)), (p1[x], p2[y])):
                if xx == UNGLUED or yy == UNGLUED:
                    if xx != yy:
                        ok = False
                        break
                    continue
                if f[xx] == UNGLUED:
                    f[xx] = yy
                    stack.append(xx)
                elif f[xx] != yy:
                    ok = False
                    break
        if ok and len(set(f)) == s1.n_slots:
            return f
    return None


# -- walks on raw pairings ---------------------------------------------------


def _pure_walk(pairing, h, exit_fn):
    e = h
    k = 0
    while True:
        x = exit_fn(e)
        k += 1
        nxt = pairing[x]
        if nxt == UNGLUED:
            return x, k
        e = nxt


def _closed_lht_cycles(pairing):
    n_slots = len(pairing)
    on_chain = [False] * n_slots
    for h in range(n_slots):
        if pairing[h] != UNGLUED:
            continue
        e = h
        while True:
            on_chain[e] = True
            x = left_exit(e)
            if pairing[x] == UNGLUED:
                break
            e = pairing[x]
    cycles = []
    for e0 in range(n_slots):
        if on_chain[e0]:
            continue
        cyc = []
        e = e0
        while not on_chain[e]:
            on_chain[e] = True
            cyc.append(e)
            e = pairing[left_exit(e)]
        cycles.append(cyc)
    return cycles


def arcs_from(pairing, start, limit):
    """Short arcs leaving the unglued slot ``start``.

    Yields ``(exit_slot, trace, pure_length)`` for every path that enters
    the surface through ``start`` and leaves through an unglued slot, and
    that is "short": mixed words with trace ``< limit``, or pure words
    ``L^k``/``R^k`` with ``k + 2 < limit``.  ``pure_length`` is 0 for mixed
    words and ``trace`` is 2 for pure ones.  Paths ending at ``start`` itself
    are included.
    """
    # stack entries: entering slot, matrix, pure run length (0 = mixed), run letter
    stack = [(start, 1, 0, 0, 1, 0, "")]
    while stack:
        e, a, b, c, d, run, letter = stack.pop()
        for x, ch in ((left_exit(e), "L"), (right_exit(e), "R")):
            na, nb, nc, nd = times_letter(a, b, c, d, ch)
            if run == 0 and letter:
                nrun, nletter = 0, letter
                t = na + nd
                if t >= limit:
                    continue
            elif not letter or ch == letter:
                nrun, nletter = run + 1, ch
                t = 2
                if nrun + 2 >= limit:
                    continue
            else:
                nrun, nletter = 0, "M"
                t = na + nd
                if t >= limit:
                    continue
            y = pairing[x]
            if y == UNGLUED:
                yield x, t, nrun
            else:
                stack.append((y, na, nb, nc, nd, nrun, nletter))


def min_closing_trace(pairing, h1, h2, limit) -> Optional[int]:
    """Smallest trace ``< limit`` of a mixed closed cycle created by gluing ``h1``, ``h2``.

    Every cycle through the new edge is found by starting just after a
    crossing into ``h1``; cycles may cross the new edge several times.
    """
    p = list(pairing)
    p[h1], p[h2] = h2, h1
    best = None
    stack = [(h1, 1, 0, 0, 1, 0, "")]
    while stack:
        e, a, b, c, d, run, letter = stack.pop()
        for x, ch in ((left_exit(e), "L"), (right_exit(e), "R")):
            na, nb, nc, nd = times_letter(a, b, c, d, ch)
            if run == 0 and letter:
                nrun, nletter = 0, letter
            elif not letter or ch == letter:
                nrun, nletter = run + 1, ch
            else:
                nrun, nletter = 0, "M"
            if nrun:
                if nrun + 2 >= limit:
                    continue
            else:
                t = na + nd
                if t >= limit:
                    continue
            y = p[x]
            if y == UNGLUED:
                continue
            if y == h1 and nrun == 0:
                t = na + nd
                if best is None or t < best:
                    best = t
                    limit = t  # only shorter cycles matter from here on
            stack.append((y, na, nb, nc, nd, nrun, nletter))
    return best


# -- trace distance ----------------------------------------------------------


def _check_dangling(s: TriangulatedSurface, *hs):
    for h in hs:
        if not 0 <= h < s.n_slots or s.pairing[h] != UNGLUED:
            raise ValueError(f"slot {h} is not an unglued side")


def trace_distance(s: TriangulatedSurface, h1: int, h2: int, tau0: int) -> int:
    """Minimal trace ``> 2`` of a path from ``h1`` to ``h2``.

    The value is exact when it is below ``tau0``; ``tau0`` itself means
    "at least tau0" (including "no such path").
    """
    _check_dangling(s, h1, h2)
    if h1 == h2:
        raise ValueError("trace distance needs two different half-edges")
    best = tau0
    for x, t, run in arcs_from(s.pairing, h1, tau0):
        if x == h2 and run == 0 and t < best:
            best = t
    return best


def pure_turn_runs(s: TriangulatedSurface, h1: int, h2: int) -> Optional[int]:
    """Smallest ``k`` such that a path carrying ``L^k`` or ``R^k`` joins ``h1`` to ``h2``."""
    _check_dangling(s, h1, h2)
    if h1 == h2:
        raise ValueError("pure runs need two different half-edges")
    ks = []
    for walk in (s.left_walk, s.right_walk):
        x, k = walk(h1)
        if x == h2:
            ks.append(k)
    return min(ks) if ks else None


# -- closed geodesics --------------------------------------------------------


@dataclass(frozen=True)
class Geodesic:
    """Closed geodesic given by a cyclic non-backtracking walk in the dual graph.

    ``darts`` are the entering slots in order; ``word`` the turns made in
    those triangles.
    """

    darts: tuple[int, ...]
    word: str
    trace: int
    length: float = field(compare=False)

    def to_json(self) -> dict:
        return {"word": self.word, "trace": self.trace, "length": self.length}


def cycle_word(pairing, darts: Sequence[int]) -> str:
    k = len(darts)
    return "".join(turn_letter(darts[i], pairing[darts[(i + 1) % k]]) for i in range(k))


def canonical_cycle(pairing, darts: Sequence[int]) -> tuple[int, ...]:
    """Canonical representative of a dart cycle up to rotation and reversal."""
    k = len(darts)
    fwd = tuple(darts)
    rev = tuple(pairing[darts[(i + 1) % k]] for i in range(k))[::-1]
    return min(seq[i:] + seq[:i] for seq in (fwd, rev) for i in range(k))


def _make_geodesic(pairing, darts) -> Geodesic:
    word = cycle_word(pairing, darts)
    a, b, c, d = 1, 0, 0, 1
    for ch in word:
        a, b, c, d = times_letter(a, b, c, d, ch)
    return Geodesic(tuple(darts), word, a + d, geodesic_length(a + d))


def closed_walks(pairing, max_trace: int):
    """Dart cycles of mixed closed walks with trace ``<= max_trace``.

    Each walk is reported starting from its smallest entering dart (possibly
    more than once if that dart is visited repeatedly).  Unglued slots are
    dead ends.
    """
    limit = max_trace + 1
    n_slots = len(pairing)
    for e0 in range(n_slots):
        stack = [((e0,), 1, 0, 0, 1, 0, "")]
        while stack:
            seq, a, b, c, d, run, letter = stack.pop()
            e = seq[-1]
            for x, ch in ((left_exit(e), "L"), (right_exit(e), "R")):
                na, nb, nc, nd = times_letter(a, b, c, d, ch)
                if run == 0 and letter:
                    nrun, nletter = 0, letter
                elif not letter or ch == letter:
                    nrun, nletter = run + 1, ch
                else:
                    nrun, nletter = 0, "M"
                if nrun:
                    if nrun + 2 >= limit:
                        continue
                elif na + nd >= limit:
                    continue
                y = pairing[x]
                if y == UNGLUED or y < e0:
                    continue
                if y == e0 and nrun == 0:
                    yield seq
                stack.append((seq + (y,), na, nb, nc, nd, nrun, nletter))


def enumerate_short_geodesics(s: TriangulatedSurface, max_trace: int) -> list[Geodesic]:
    """All closed geodesics with ``2 < trace <= max_trace``, one per unoriented free homotopy class.

    Non-primitive geodesics (multiply traversed) are included.  Sorted by
    (trace, darts).
    """
    if not s.is_closed:
        raise TopologyError("closed geodesics are enumerated on closed surfaces")
    found = {}
    for seq in closed_walks(s.pairing, max_trace):
        key = canonical_cycle(s.pairing, seq)
        if key not in found:
            found[key] = _make_geodesic(s.pairing, key)
    return sorted(found.values(), key=lambda g: (g.trace, g.darts))


def trace_upper_bound(genus: int, cusps: int) -> int:
    """Trace form of ``2 acosh((6g + 3C - 6) / C)``.

    With one cusp this is ``12g - 6``.  For several cusps the bound is not
    reliable for this construction (regular covers of the two-triangle torus
    exceed it), so nothing here uses it as a search limit.
    """
    return (2 * (6 * genus + 3 * cusps - 6)) // cusps


def systole(s: TriangulatedSurface, start: int = 3) -> tuple[float, Geodesic]:
    """Length of the shortest closed geodesic and a witness.

    Searches with trace caps ``start, 2 start, 4 start, ...``; the answer does
    not depend on ``start``.  A closed connected surface always has a closed
    geodesic (its fundamental group is free of rank at least 2), so the
    search terminates.
    """
    if not s.is_closed or not s.is_connected:
        raise TopologyError("systole needs a closed connected surface")
    cap = max(3, start)
    while True:
        geods = enumerate_short_geodesics(s, cap)
        if geods:
            best = geods[0]
            return best.length, best
        cap *= 2


def min_trace_below(s: TriangulatedSurface, max_trace: int) -> Optional[int]:
    """Smallest geodesic trace ``<= max_trace``, without collecting certificates."""
    best = None
    for seq in closed_walks(s.pairing, max_trace):
        t = _make_geodesic(s.pairing, seq).trace
        if best is None or t < best:
            best = t
    return best


# -- fundamental group -------------------------------------------------------


@dataclass(frozen=True)
class FreeGenerators:
    """Spanning tree of the dual graph and one free generator per chord.

    ``crossing[x]`` is the generator picked up when a walk leaves a triangle
    through slot ``x``: ``+(i+1)`` or ``-(i+1)`` for chord ``i`` depending on
    direction, ``0`` for tree edges and unglued slots.
    """

    tree_edges: tuple[tuple[int, int], ...]
    chords: tuple[tuple[int, int], ...]
    crossing: tuple[int, ...]

    @property
    def rank(self) -> int:
        return len(self.chords)

    def cycle_to_word(self, pairing, darts: Sequence[int]) -> tuple[int, ...]:
        """Generator word of a dart cycle (tree edges collapse to nothing)."""
        word = []
        for e in darts:
            g = self.crossing[pairing[e]]
            if g:
                word.append(g)
        return tuple(word)


def free_generators(s: TriangulatedSurface) -> FreeGenerators:
    if not s.is_connected:
        raise TopologyError("free generators need a connected surface")
    if s.is_closed and s.interior_cusps() == 0:
        raise TopologyError("surface without cusps has non-free fundamental group")
    p = s.pairing
    seen = [False] * s.n_triangles
    seen[0] = True
    tree = set()
    queue = deque([0])
    while queue:
        t = queue.popleft()
        for x in range(3 * t, 3 * t + 3):
            y = p[x]
            if y != UNGLUED and not seen[y // 3]:
                seen[y // 3] = True
                tree.add((min(x, y), max(x, y)))
                queue.append(y // 3)
    crossing = [0] * s.n_slots
    chords = []
    for x, y in s.glued_pairs():
        if (x, y) in tree:
            continue
        chords.append((x, y))
        crossing[x] = len(chords)
        crossing[y] = -len(chords)
    return FreeGenerators(tuple(sorted(tree)), tuple(chords), tuple(crossing))


def standard_torus() -> TriangulatedSurface:
    """Two triangles glued ``0-3, 1-4, 2-5``: a torus with one cusp."""
    return TriangulatedSurface.from_pairing(1, {0: 3, 1: 4, 2: 5})


__all__ = [
    "UNGLUED",
    "PairingError",
    "TopologyError",
    "TriangulatedSurface",
    "Geodesic",
    "FreeGenerators",
    "left_exit",
    "right_exit",
    "arcs_from",
    "min_closing_trace",
    "trace_distance",
    "pure_turn_runs",
    "enumerate_short_geodesics",
    "closed_walks",
    "canonical_cycle",
    "cycle_word",
    "systole",
    "min_trace_below",
    "trace_upper_bound",
    "free_generators",
    "find_isomorphism",
    "split_components",
    "permutation_orbits",
    "is_transitive",
    "standard_torus",
]
