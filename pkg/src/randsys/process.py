"""Random constrained gluing of ideal triangles.

Starting from an annulus of ``2n`` triangles, pairs of unglued sides are
glued uniformly at random among the pairs whose gluing creates no closed
geodesic of trace below ``tau0``.  If every side gets glued, the result is a
closed cusped surface with systole at least ``2 acosh(tau0 / 2)``.

The ``fixed_genus`` variant additionally refuses gluings that would close a
cusp early; once the state is safe it is completed deterministically into a
one-cusp surface of genus ``(n + 1) / 2`` (for odd ``n``).
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .surface import (
    UNGLUED,
    TriangulatedSurface,
    arcs_from,
    closed_walks,
    left_exit,
    min_closing_trace,
    right_exit,
    systole,
    _pure_walk,
)
from .words import trace

VARIANTS = ("plain", "fixed_genus")
AVAILABILITY_MODES = ("exact", "trace_distance")
REJECTION_TRIES = 32


class SeedTooShortError(ValueError):
    pass


class PreconditionError(ValueError):
    pass


@dataclass(frozen=True)
class ProcessConfig:
    n: int
    tau0: int
    variant: str = "plain"
    forbid_pure_L_closures: bool = False
    max_attempts: int = 75
    seed: int = 0
    availability: str = "exact"

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be at least 1")
        if self.tau0 < 3:
            raise ValueError("tau0 must be at least 3")
        if self.max_attempts < 1:
            raise ValueError("max_attempts must be at least 1")
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}")
        if self.availability not in AVAILABILITY_MODES:
            raise ValueError(f"unknown availability mode {self.availability!r}")


def attempt_rng(seed: int, tau0: int, attempt: int) -> np.random.Generator:
    """Independent counter-based stream for one attempt."""
    ss = np.random.SeedSequence(int(seed) & (2**64 - 1), spawn_key=(int(tau0), int(attempt)))
    return np.random.Generator(np.random.Philox(ss))


def annulus_pairing(n: int) -> list[int]:
    """Pairing of the annulus whose core curve carries ``(LR)^n``.

    Triangle ``i`` is entered through slot ``3i`` and left through ``3i+1``
    (even ``i``, a left turn) or ``3i+2`` (odd ``i``, a right turn).
    """
    m = 2 * n
    p = [UNGLUED] * (3 * m)
    for i in range(m):
        out = 3 * i + (1 if i % 2 == 0 else 2)
        nxt = 3 * ((i + 1) % m)
        p[out], p[nxt] = nxt, out
    return p


class ProcessState:
    """Partial surface plus the bookkeeping that makes availability cheap.

    ``short[h]`` holds the unglued slots reachable from ``h`` by a short arc
    (see :func:`arcs_from`); ``blocked[h]`` the partners whose gluing with
    ``h`` would close a short geodesic.
    """

    def __init__(self, pairing, tau0: int, variant: str = "plain",
                 forbid_pure_L_closures: bool = False, availability: str = "exact",
                 rng: Optional[np.random.Generator] = None, check: bool = True):
        self.pairing = list(pairing)
        self.tau0 = tau0
        self.variant = variant
        self.forbid_pure_L_closures = forbid_pure_L_closures
        self.availability = availability
        self.rng = rng if rng is not None else attempt_rng(0, tau0, 0)
        self.t = 0
        self.history: list[tuple[int, int]] = []
        if check:
            TriangulatedSurface(self.pairing)
            if any(True for _ in closed_walks(self.pairing, tau0 - 1)):
                raise SeedTooShortError("initial configuration already has a short closed geodesic")
        self.unglued = sorted(s for s, q in enumerate(self.pairing) if q == UNGLUED)
        self._rebuild()

    @classmethod
    def from_config(cls, cfg: ProcessConfig, rng=None) -> "ProcessState":
        st = init_annulus(cfg.n, cfg.tau0)
        st.variant = cfg.variant
        st.forbid_pure_L_closures = cfg.forbid_pure_L_closures
        st.availability = cfg.availability
        st.rng = rng if rng is not None else attempt_rng(cfg.seed, cfg.tau0, 0)
        st._rebuild()
        return st

    @property
    def surface(self) -> TriangulatedSurface:
        return TriangulatedSurface(self.pairing)

    @property
    def n(self) -> int:
        return len(self.pairing) // 6

    # -- bookkeeping -----------------------------------------------------

    def _short_set(self, h):
        return {x for x, _, _ in arcs_from(self.pairing, h, self.tau0)}

    def _is_blocked(self, h1, h2) -> bool:
        if self.availability == "trace_distance":
            return any(x == h2 and run == 0 for x, _, run in arcs_from(self.pairing, h1, self.tau0))
        # only pairs joined by short arcs can close a short cycle
        s1, s2 = self.short[h1], self.short[h2]
        if h2 not in s1 and not (h1 in s1 and h2 in s2):
            return False
        return min_closing_trace(self.pairing, h1, h2, self.tau0) is not None

    def _block_partners(self, h):
        out = set()
        for h2 in self.unglued:
            if h2 != h and self._is_blocked(h, h2):
                out.add(h2)
        return out

    def _rebuild(self):
        self.short = {h: self._short_set(h) for h in self.unglued}
        self.blocked = {h: set() for h in self.unglued}
        for h in self.unglued:
            for h2 in self._block_partners(h):
                self.blocked[h].add(h2)
                self.blocked[h2].add(h)

    def glue(self, a: int, b: int) -> None:
        if a == b or self.pairing[a] != UNGLUED or self.pairing[b] != UNGLUED:
            raise PreconditionError(f"cannot glue {a} and {b}")
        affected = (self.short[a] | self.short[b]) - {a, b}
        self.pairing[a], self.pairing[b] = b, a
        self.unglued.remove(a)
        self.unglued.remove(b)
        for h in (a, b):
            del self.short[h]
            for h2 in self.blocked.pop(h):
                if h2 not in (a, b):
                    self.blocked[h2].discard(h)
        for h in self.short:
            self.short[h] -= {a, b}
        for h in affected:
            self.short[h] = self._short_set(h)
        for h in affected:
            for h2 in self.blocked[h]:
                self.blocked[h2].discard(h)
            self.blocked[h] = set()
        for h in affected:
            for h2 in self._block_partners(h):
                self.blocked[h].add(h2)
                self.blocked[h2].add(h)
        self.t += 1
        self.history.append((min(a, b), max(a, b)))

    def copy(self) -> "ProcessState":
        new = object.__new__(ProcessState)
        new.__dict__.update(self.__dict__)
        new.pairing = list(self.pairing)
        new.unglued = list(self.unglued)
        new.short = {h: set(v) for h, v in self.short.items()}
        new.blocked = {h: set(v) for h, v in self.blocked.items()}
        new.history = list(self.history)
        return new

    # -- boundary structure ----------------------------------------------

    def next_left(self, h) -> int:
        return _pure_walk(self.pairing, h, left_exit)[0]

    def next_right(self, h) -> int:
        return _pure_walk(self.pairing, h, right_exit)[0]

    def excluded_pairs(self) -> set[tuple[int, int]]:
        """Pairs ruled out by the variant, independent of traces."""
        out = set()
        if self.variant != "fixed_genus" and not self.forbid_pure_L_closures:
            return out
        if self.variant != "fixed_genus" and len(self.unglued) <= 2:
            return out
        for h in self.unglued:
            nl = self.next_left(h)
            partners = [nl]
            if self.variant == "fixed_genus":
                partners.append(self.next_left(nl))
            for h2 in partners:
                if h2 != h:
                    out.add((min(h, h2), max(h, h2)))
        return out

    def is_available(self, h1, h2, excluded=None) -> bool:
        if h1 == h2 or h2 in self.blocked.get(h1, ()):
            return False
        if excluded is None:
            excluded = self.excluded_pairs()
        return (min(h1, h2), max(h1, h2)) not in excluded


def init_annulus(n: int, tau0: int) -> ProcessState:
    """Process state on the ``(LR)^n`` annulus."""
    if n < 1:
        raise ValueError("n must be at least 1")
    core = trace("LR" * n)
    if core < tau0:
        raise SeedTooShortError(f"core curve of the annulus has trace {core} < {tau0}")
    return ProcessState(annulus_pairing(n), tau0, check=False)


def available_pairs(state: ProcessState) -> list[tuple[int, int]]:
    excluded = state.excluded_pairs()
    hs = state.unglued
    out = []
    for i, h1 in enumerate(hs):
        bl = state.blocked[h1]
        for h2 in hs[i + 1:]:
            if h2 not in bl and (h1, h2) not in excluded:
                out.append((h1, h2))
    return out


def choose_pair(state: ProcessState, rng: np.random.Generator) -> Optional[tuple[int, int]]:
    """Uniformly random available pair, or None when there is none.

    A few rounds of rejection sampling over all pairs, then an explicit
    enumeration; both stages are uniform on the available set.
    """
    hs = state.unglued
    d = len(hs)
    if d < 2:
        return None
    excluded = state.excluded_pairs()
    for _ in range(REJECTION_TRIES):
        i, j = rng.choice(d, size=2, replace=False)
        h1, h2 = sorted((hs[i], hs[j]))
        if h2 not in state.blocked[h1] and (h1, h2) not in excluded:
            return h1, h2
    pairs = available_pairs(state)
    if not pairs:
        return None
    return pairs[int(rng.integers(len(pairs)))]


def step(state: ProcessState) -> Optional[tuple[int, int]]:
    """Glue one uniformly random available pair; None signals that none is left."""
    pair = choose_pair(state, state.rng)
    if pair is not None:
        state.glue(*pair)
    return pair


def pure_runs_ok(state: ProcessState) -> bool:
    need = state.tau0 - 2
    for h in state.unglued:
        for walk in (left_exit, right_exit):
            k = _pure_walk(state.pairing, h, walk)[1]
            if k * k < need:
                return False
    return True


def is_safe(state: ProcessState) -> bool:
    """No remaining pair is blocked and every boundary cusp is deep enough.

    A boundary cusp with ``k`` incident triangles leaves a pure run of
    ``k`` turns; it must satisfy ``k^2 >= tau0 - 2``.
    """
    if any(state.blocked[h] for h in state.unglued):
        return False
    return pure_runs_ok(state)


# -- deterministic completion ------------------------------------------------


def complete_min_cusps(state: ProcessState) -> TriangulatedSurface:
    """Glue all remaining sides of a safe state with as few cusps as possible.

    Boundary components are merged one into the next (ascending minimal
    slot), leaving a single ``2s``-gon whose sides are glued to their
    opposites; for odd ``s`` the two sides at the minimal slot are glued
    together first.
    """
    if state.variant != "fixed_genus":
        raise PreconditionError("completion belongs to the fixed-genus variant")
    if not is_safe(state):
        raise PreconditionError("state is not safe")
    surf = TriangulatedSurface(state.pairing)
    if surf.interior_cusps():
        raise PreconditionError("state already has an interior cusp")
    p = list(state.pairing)

    def components():
        return TriangulatedSurface(p).boundary_components()

    comps = components()
    while len(comps) > 1:
        comps.sort(key=min)
        a, b = min(comps[0]), min(comps[1])
        p[a], p[b] = b, a
        comps = components()
    if comps:
        cyc = comps[0]
        i0 = cyc.index(min(cyc))
        cyc = cyc[i0:] + cyc[:i0]
        if len(cyc) % 2:
            raise AssertionError("odd number of unglued sides")
        if (len(cyc) // 2) % 2:
            a, b = cyc[0], cyc[1]
            p[a], p[b] = b, a
            cyc = cyc[2:]
        s = len(cyc) // 2
        for i in range(s):
            a, b = cyc[i], cyc[i + s]
            p[a], p[b] = b, a
    return TriangulatedSurface(p)


# -- runs --------------------------------------------------------------------


@dataclass
class ProcessOutcome:
    n: int
    tau0: int
    variant: str
    saturated: bool
    t_max: int
    surface: TriangulatedSurface
    attempts_used: int = 1
    seed: Optional[int] = None
    attempt: int = 0
    genus: Optional[int] = None
    cusps: Optional[int] = None
    systole: Optional[float] = None
    systole_trace: Optional[int] = None
    systole_word: Optional[str] = None
    verified: bool = False
    safe_from: Optional[int] = None
    safe_stall: bool = False
    completed_from: Optional[int] = None
    history: list = field(default_factory=list, repr=False)

    def csv_row(self) -> dict:
        return {
            "genus": self.genus,
            "n": self.n,
            "tau0": self.tau0,
            "systole": self.systole,
            "saturated": self.saturated,
            "attempts_used": self.attempts_used,
            "seed": self.seed,
        }


def _finish(out: ProcessOutcome) -> ProcessOutcome:
    s = out.surface
    if not (s.is_closed and s.is_connected):
        return out
    out.genus, out.cusps = s.genus_and_cusps()
    out.systole, geo = systole(s, start=out.tau0)
    out.systole_trace, out.systole_word = geo.trace, geo.word
    out.verified = geo.trace >= out.tau0
    return out


def run(cfg: ProcessConfig, rng: Optional[np.random.Generator] = None, attempt: int = 0) -> ProcessOutcome:
    """One attempt of the process; the outcome carries an independent systole check."""
    if rng is None:
        rng = attempt_rng(cfg.seed, cfg.tau0, attempt)
    state = ProcessState.from_config(cfg, rng)
    safe_from = None
    completed_from = None
    stalled = False
    while state.unglued:
        if safe_from is None and not any(state.blocked[h] for h in state.unglued) and pure_runs_ok(state):
            safe_from = state.t
            if cfg.variant == "fixed_genus":
                completed_from = state.t
                break
        if step(state) is None:
            stalled = True
            break
    if completed_from is not None:
        surface = complete_min_cusps(state)
        t_max = state.t + len(state.unglued) // 2
    else:
        surface = state.surface
        t_max = state.t
    out = ProcessOutcome(
        n=cfg.n,
        tau0=cfg.tau0,
        variant=cfg.variant,
        saturated=surface.is_closed,
        t_max=t_max,
        surface=surface,
        seed=cfg.seed,
        attempt=attempt,
        safe_from=safe_from,
        safe_stall=stalled and safe_from is not None,
        completed_from=completed_from,
        history=list(state.history),
    )
    return _finish(out)


def _accepts(out: ProcessOutcome, genus: int) -> bool:
    return out.saturated and out.verified and out.genus == genus and out.cusps == 1


def _attempt(args):
    cfg, k = args
    return run(cfg, attempt=k)


def search_with_retries(genus: int, seed: int, tau_start: Optional[int] = None,
                        max_attempts: int = 75, threads: int = 1,
                        forbid_pure_L_closures: bool = False) -> ProcessOutcome:
    """Largest threshold for which a verified one-cusp surface of the given genus is found.

    Tries ``max_attempts`` seeded attempts per threshold, lowering it by one
    after a total failure.  Attempt ``k`` at threshold ``tau0`` always uses
    the same random stream, so the result does not depend on ``threads``.
    """
    if genus < 1:
        raise ValueError("genus must be at least 1")
    n = 2 * genus - 1
    tau = max(3, round(genus)) if tau_start is None else tau_start
    # the annulus core must not be shorter than the threshold
    tau = min(tau, trace("LR" * n))
    used = 0
    pool = ProcessPoolExecutor(threads) if threads > 1 else None
    try:
        while tau >= 3:
            cfg = ProcessConfig(n=n, tau0=tau, variant="fixed_genus", seed=seed,
                                max_attempts=max_attempts,
                                forbid_pure_L_closures=forbid_pure_L_closures)
            for lo in range(0, max_attempts, threads):
                ks = list(range(lo, min(lo + threads, max_attempts)))
                if pool is None:
                    outs = [run(cfg, attempt=k) for k in ks]
                else:
                    outs = list(pool.map(_attempt, [(cfg, k) for k in ks]))
                for k, out in zip(ks, outs):
                    used += 1
                    if _accepts(out, genus):
                        out.attempts_used = used
                        return out
            tau -= 1
    finally:
        if pool is not None:
            pool.shutdown()
    return ProcessOutcome(n=n, tau0=2, variant="fixed_genus", saturated=False, t_max=0,
                          surface=TriangulatedSurface(annulus_pairing(n)),
                          attempts_used=used, seed=seed)


def sigma0(tau0: int) -> float:
    """Length ``2 acosh(tau0 / 2)`` guaranteed by threshold ``tau0``."""
    return 2.0 * math.acosh(tau0 / 2.0)
