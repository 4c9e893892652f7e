"""Random regular covers of cusped surfaces.

The fundamental group of a cusped surface is free on the chords of a
spanning tree of the dual graph, so a homomorphism to a finite group ``G``
is just an arbitrary choice of images.  The cover attached to its kernel
has ``|G|`` copies of every triangle; a closed geodesic ``w`` downstairs
lifts to a closed geodesic of trace ``tr(w^k)`` where ``k`` is the order of
the image of ``w``.
"""

from __future__ import annotations

import csv
import io
import itertools
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .groups import FiniteGroup, Symmetric, format_word, parse_word
from .surface import (
    FreeGenerators,
    TopologyError,
    TriangulatedSurface,
    enumerate_short_geodesics,
    free_generators,
)
from .words import geodesic_length, length_to_trace_bound, trace


@dataclass(frozen=True)
class Homomorphism:
    base: TriangulatedSurface
    gens: FreeGenerators
    group: FiniteGroup
    images: tuple

    def __call__(self, word):
        return self.group.evaluate(self.images, word)

    @property
    def image_order(self) -> int:
        """Order of the subgroup generated by the images (equals ``|G|`` iff surjective)."""
        return self.group.generated_subgroup_order(self.images)

    @property
    def is_surjective(self) -> bool:
        return self.image_order == self.group.order


def _check_cusped_base(base: TriangulatedSurface) -> FreeGenerators:
    if not base.is_closed:
        raise TopologyError("base must be glued completely")
    return free_generators(base)


def sample_hom(base: TriangulatedSurface, group: FiniteGroup, rng: np.random.Generator) -> Homomorphism:
    """Uniform random homomorphism from the (free) fundamental group of ``base``."""
    gens = _check_cusped_base(base)
    images = tuple(group.random(rng) for _ in range(gens.rank))
    return Homomorphism(base, gens, group, images)


@dataclass(frozen=True)
class CoverGeodesic:
    base_word: str
    base_trace: int
    generator_word: str
    k: int
    trace: int

    @property
    def length(self) -> float:
        return geodesic_length(self.trace)

    def to_json(self) -> dict:
        return {
            "base_word": self.base_word,
            "base_trace": self.base_trace,
            "generator_word": self.generator_word,
            "k": self.k,
            "trace": self.trace,
            "length": self.length,
        }


def cover_systole(base: TriangulatedSurface, hom: Homomorphism,
                  max_length: Optional[float] = None,
                  max_trace: Optional[int] = None) -> Optional[CoverGeodesic]:
    """Shortest closed geodesic of the cover, or None if it is longer than the cap.

    Every closed geodesic upstairs covers a power of a base geodesic of at
    most the same trace, so once the best candidate is within the current
    enumeration bound it is exact.  For a disconnected cover (non-surjective
    ``hom``) this is the minimum over components, which are all isometric.
    """
    cap = None
    if max_length is not None:
        cap = length_to_trace_bound(max_length)
    if max_trace is not None:
        cap = max_trace if cap is None else min(cap, max_trace)
    gens = hom.gens
    p = base.pairing
    bound = 3 if cap is None else min(3, cap)
    while True:
        best = None
        for geo in enumerate_short_geodesics(base, bound):
            gw = gens.cycle_to_word(p, geo.darts)
            k = hom.group.element_order(hom(gw))
            t = trace(geo.word * k)
            if best is None or t < best.trace:
                best = CoverGeodesic(geo.word, geo.trace, format_word(gw), k, t)
        if best is not None and best.trace <= bound:
            break
        if cap is not None and bound >= cap:
            best = None
            break
        bound = 2 * bound if cap is None else min(2 * bound, cap)
    if best is not None and cap is not None and best.trace > cap:
        return None
    return best


def build_cover(base: TriangulatedSurface, hom: Homomorphism, max_triangles: int = 200_000) -> TriangulatedSurface:
    """The regular cover attached to ``ker(hom)``, glued explicitly.

    Copy ``i`` of base triangle ``t`` is triangle ``i * F + t`` where ``F``
    is the number of base triangles and ``i`` indexes ``group.elements()``.
    Leaving copy ``g`` through a chord with generator ``c`` lands in copy
    ``g * hom(c)``.
    """
    gens = _check_cusped_base(base)
    group = hom.group
    n_tri = base.n_triangles
    if group.order * n_tri > max_triangles:
        raise ValueError(f"cover with {group.order * n_tri} triangles exceeds the size guard")
    els = group.elements()
    idx = {x: i for i, x in enumerate(els)}
    n_slots = base.n_slots
    pairing = [0] * (len(els) * n_slots)
    for gi, g in enumerate(els):
        for x in range(n_slots):
            y = base.pairing[x]
            c = gens.crossing[x]
            h = g if c == 0 else group.mul(g, hom((c,)))
            pairing[gi * n_slots + x] = idx[h] * n_slots + y
    return TriangulatedSurface(pairing)


def deck_action(base: TriangulatedSurface, group: FiniteGroup, h) -> list[int]:
    """Slot permutation of ``build_cover`` output induced by left multiplication by ``h``."""
    els = group.elements()
    idx = {x: i for i, x in enumerate(els)}
    n_slots = base.n_slots
    perm = []
    for g in els:
        j = idx[group.mul(h, g)]
        perm.extend(j * n_slots + x for x in range(n_slots))
    return perm


# -- closed surface groups ---------------------------------------------------


def surface_relator(group: FiniteGroup, elems: Sequence) -> tuple:
    """Product of commutators ``[A_1, B_1] ... [A_g, B_g]``."""
    r = group.identity
    for i in range(0, len(elems), 2):
        r = group.mul(r, group.commutator(elems[i], elems[i + 1]))
    return r


def rejection_sample_closed(genus: int, group: FiniteGroup, rng: np.random.Generator,
                            max_tries: int = 100_000) -> Optional[tuple]:
    """Uniform homomorphism from the genus-``genus`` surface group, by rejection.

    Returns the images ``(A_1, B_1, ..., A_g, B_g)`` or None after ``max_tries``.
    """
    if genus < 1:
        raise ValueError("genus must be positive")
    for _ in range(max_tries):
        elems = tuple(group.random(rng) for _ in range(2 * genus))
        if surface_relator(group, elems) == group.identity:
            return elems
    return None


def _commutator_table(group: FiniteGroup) -> np.ndarray:
    tab = group.table
    inv = group.inverse_index
    a = np.arange(len(tab))
    ab = tab[a[:, None], a[None, :]]
    ainv_binv = tab[inv[:, None], inv[None, :]]
    return tab[ab, ainv_binv]


def count_surface_homs(genus: int, group: FiniteGroup) -> int:
    """Exhaustive count of ``2g``-tuples satisfying the surface relator."""
    tab = group.table
    e = group.identity_index
    comm = _commutator_table(group).ravel()
    # distribution of the relator prefix, extended one commutator at a time
    counts = np.zeros(len(tab), dtype=object)
    counts[e] = 1
    for _ in range(genus):
        nxt = np.zeros(len(tab), dtype=object)
        for x in np.nonzero(counts)[0]:
            ys, cnt = np.unique(tab[x, comm], return_counts=True)
            for y, c in zip(ys, cnt):
                nxt[y] += counts[x] * int(c)
        counts = nxt
    return int(counts[e])


def count_genus2_homs_brute(group: FiniteGroup) -> int:
    """All ``|G|^4`` quadruples, tested one by one (vectorised)."""
    tab = group.table
    comm = _commutator_table(group).ravel()
    prod = tab[comm[:, None], comm[None, :]]
    return int(np.count_nonzero(prod == group.identity_index))


def acceptance_count(genus: int, group: FiniteGroup, rng: np.random.Generator,
                     tries: int, batch: int = 200_000) -> int:
    """Number of accepted draws among ``tries`` uniform ``2g``-tuples."""
    tab = group.table
    comm = _commutator_table(group)
    e = group.identity_index
    total = 0
    done = 0
    while done < tries:
        m = min(batch, tries - done)
        draws = rng.integers(0, len(tab), size=(m, 2 * genus))
        r = np.full(m, e)
        for i in range(genus):
            r = tab[r, comm[draws[:, 2 * i], draws[:, 2 * i + 1]]]
        total += int(np.count_nonzero(r == e))
        done += m
    return total


# -- statistics --------------------------------------------------------------


def _rank_of(base, word) -> int:
    w = parse_word(word)
    if base is not None:
        return free_generators(base).rank
    return max(abs(g) for g in w)


def kernel_probability(base, group: FiniteGroup, word, samples: int,
                       rng: np.random.Generator) -> tuple[float, float]:
    """Fraction of uniform homomorphisms killing ``word``, with its standard error."""
    w = parse_word(word)
    if not w:
        raise ValueError("word must be nontrivial")
    rank = _rank_of(base, w)
    hits = 0
    for _ in range(samples):
        images = [group.random(rng) for _ in range(rank)]
        hits += group.evaluate(images, w) == group.identity
    p = hits / samples
    return p, math.sqrt(p * (1 - p) / samples)


def exact_kernel_count(group: FiniteGroup, word) -> int:
    """Number of pairs ``(a, b)`` in ``G^2`` with ``word(a, b) = e``."""
    w = parse_word(word)
    els = group.elements()
    return sum(group.evaluate((a, b), w) == group.identity for a in els for b in els)


def _perm_word(perms: np.ndarray, w) -> np.ndarray:
    """Evaluate a generator word on stacked permutations, ``perms[i]`` of shape (samples, n)."""
    samples, n = perms[0].shape
    rows = np.arange(samples)[:, None]
    r = np.broadcast_to(np.arange(n), (samples, n)).copy()
    inverses = {}
    for g in w:
        x = perms[abs(g) - 1]
        if g < 0:
            if abs(g) not in inverses:
                inv = np.empty_like(x)
                inv[rows, x] = np.arange(n)
                inverses[abs(g)] = inv
            x = inverses[abs(g)]
        # r * x: first x, then r
        r = r[rows, x]
    return r


def fixed_point_stats(base, degrees: Sequence[int], word, samples: int,
                      rng: np.random.Generator) -> list[dict]:
    """Mean number of fixed points of the image of ``word`` in ``Sym(n)``."""
    w = parse_word(word)
    if not w:
        raise ValueError("word must be nontrivial")
    rank = _rank_of(base, w)
    rows = []
    for n in degrees:
        perms = np.stack([rng.permuted(np.broadcast_to(np.arange(n), (samples, n)), axis=1)
                          for _ in range(rank)])
        img = _perm_word(perms, w)
        fix = np.count_nonzero(img == np.arange(n), axis=1)
        mean = float(fix.mean())
        err = float(fix.std(ddof=1) / math.sqrt(samples)) if samples > 1 else float("nan")
        rows.append({"group": Symmetric(n).name, "parameter": n, "word": format_word(w),
                     "samples": samples, "estimate": mean, "stderr": err})
    return rows


def exact_fixed_point_mean(n: int, word) -> float:
    """Exact mean over all of ``Sym(n)^rank``; only for tiny ``n``."""
    w = parse_word(word)
    rank = max(abs(g) for g in w)
    g = Symmetric(n)
    els = g.elements()
    total = 0
    count = 0
    for imgs in itertools.product(els, repeat=rank):
        total += Symmetric.fixed_points(g.evaluate(imgs, w))
        count += 1
    return total / count


STAT_COLUMNS = ["group", "parameter", "word", "samples", "estimate", "stderr"]


def stats_csv(rows: Sequence[dict]) -> str:
    buf = io.StringIO()
    wr = csv.DictWriter(buf, fieldnames=STAT_COLUMNS, lineterminator="\n")
    wr.writeheader()
    for r in rows:
        wr.writerow({k: r[k] for k in STAT_COLUMNS})
    return buf.getvalue()
