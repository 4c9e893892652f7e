"""Surface records keyed by genus, and their independent verification.

A record stores ``tau0`` and the gluing list ``[i_0, ..., i_{12g-7}]``: side
``k`` is glued to side ``i_k``, triangle ``t`` owning sides ``3t, 3t+1,
3t+2`` in counter-clockwise order.  On disk a database is one canonical
JSON document (sorted keys, no whitespace, integers only).
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import tempfile
from collections import deque
from dataclasses import dataclass, field
from typing import Optional

from .surface import (
    PairingError,
    TopologyError,
    TriangulatedSurface,
    enumerate_short_geodesics,
    systole,
)

FORMAT = "systole-db-v1"


class SchemaError(ValueError):
    """Malformed record or database document."""


@dataclass(frozen=True)
class SurfaceRecord:
    genus: int
    tau0: int
    gluing: tuple[int, ...]

    def to_json(self) -> dict:
        return {"gluing": list(self.gluing), "tau0": self.tau0}

    def sort_key(self):
        # better records sort first
        return (-self.tau0, self.gluing)


def canonical_relabel(s: TriangulatedSurface) -> list[int]:
    """Gluing list after relabelling triangles in breadth-first order.

    The walk starts at triangle 0 with slot 0 in position 0.  A newly
    reached triangle is rotated so that the side it was entered through
    gets position 0; sides are explored in position order.
    """
    p = s.pairing
    new_slot = [-1] * s.n_slots
    anchor = {0: 0}
    order = [0]
    queue = deque([0])
    while queue:
        t = queue.popleft()
        a = anchor[t]
        for j in range(3):
            x = 3 * t + (a + j) % 3
            y = p[x]
            if y != -1 and y // 3 not in anchor:
                anchor[y // 3] = y % 3
                order.append(y // 3)
                queue.append(y // 3)
    if len(order) != s.n_triangles:
        raise TopologyError("surface is not connected")
    pos = {t: i for i, t in enumerate(order)}
    for t in order:
        a = anchor[t]
        for j in range(3):
            new_slot[3 * t + (a + j) % 3] = 3 * pos[t] + j
    out = [0] * s.n_slots
    for x, y in enumerate(p):
        out[new_slot[x]] = new_slot[y]
    return out


def encode(s: TriangulatedSurface, tau0: int) -> SurfaceRecord:
    if not s.is_closed:
        raise TopologyError("only closed surfaces are stored")
    g, c = s.genus_and_cusps()
    if c != 1:
        raise TopologyError(f"surface has {c} cusps, records need exactly one")
    return SurfaceRecord(g, int(tau0), tuple(canonical_relabel(s)))


def decode(rec: SurfaceRecord) -> TriangulatedSurface:
    if len(rec.gluing) != 12 * rec.genus - 6:
        raise SchemaError(f"gluing has length {len(rec.gluing)}, expected {12 * rec.genus - 6}")
    try:
        return TriangulatedSurface(list(rec.gluing))
    except PairingError as exc:
        raise SchemaError(str(exc)) from exc


@dataclass
class VerifyReport:
    genus: int
    tau0: int
    checks: dict = field(default_factory=dict)
    messages: list = field(default_factory=list)
    systole_trace: Optional[int] = None

    @property
    def passed(self) -> bool:
        return bool(self.checks) and all(self.checks.values())

    def to_json(self) -> dict:
        return {
            "genus": self.genus,
            "tau0": self.tau0,
            "passed": self.passed,
            "checks": dict(self.checks),
            "systole_trace": self.systole_trace,
            "messages": list(self.messages),
        }


CHECKS = ("involution", "connected", "triangles", "one_cusp", "genus", "systole_lower", "systole_upper")


def verify(rec: SurfaceRecord) -> VerifyReport:
    """Re-derive every claim of a record from the gluing alone."""
    rep = VerifyReport(rec.genus, rec.tau0, {k: False for k in CHECKS})
    try:
        s = decode(rec)
    except SchemaError as exc:
        rep.messages.append(str(exc))
        return rep
    rep.checks["involution"] = s.is_closed
    if not s.is_closed:
        rep.messages.append("gluing leaves sides unglued")
        return rep
    rep.checks["connected"] = s.is_connected
    rep.checks["triangles"] = s.n_triangles == 4 * rec.genus - 2
    if not s.is_connected:
        rep.messages.append("surface is not connected")
        return rep
    g, c = s.genus_and_cusps()
    rep.checks["one_cusp"] = c == 1
    rep.checks["genus"] = g == rec.genus
    if c != 1:
        rep.messages.append(f"{c} cusps")
    if g != rec.genus:
        rep.messages.append(f"genus {g}")
    short = enumerate_short_geodesics(s, rec.tau0 - 1)
    rep.checks["systole_lower"] = not short
    if short:
        rep.messages.append(f"geodesic {short[0].word} has trace {short[0].trace} < {rec.tau0}")
    # one-cusp bound sys <= 2 acosh(6g - 3), as a trace bound
    rep.systole_trace = systole(s, start=max(3, rec.tau0))[1].trace
    rep.checks["systole_upper"] = rep.systole_trace <= 12 * rec.genus - 6
    return rep


# -- the database document ---------------------------------------------------


class Database:
    def __init__(self, records=()):
        self.records: dict[int, SurfaceRecord] = {}
        for r in records:
            self.add(r)

    def add(self, rec: SurfaceRecord) -> bool:
        """Insert unless an at-least-as-good record exists; returns whether it was stored."""
        old = self.records.get(rec.genus)
        if old is not None and old.sort_key() <= rec.sort_key():
            return False
        self.records[rec.genus] = rec
        return True

    def __len__(self):
        return len(self.records)

    def __iter__(self):
        return iter(self.records[g] for g in sorted(self.records))

    def to_json(self) -> dict:
        return {"format": FORMAT, "surfaces": {str(g): r.to_json() for g, r in self.records.items()}}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))

    @classmethod
    def loads(cls, text: str) -> "Database":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"not JSON: {exc}") from exc
        if not isinstance(doc, dict) or doc.get("format") != FORMAT:
            raise SchemaError("missing or unknown format tag")
        surfaces = doc.get("surfaces")
        if not isinstance(surfaces, dict):
            raise SchemaError("'surfaces' must be an object")
        db = cls()
        for key, val in surfaces.items():
            try:
                g = int(key)
                tau0 = val["tau0"]
                gluing = val["gluing"]
            except (ValueError, TypeError, KeyError) as exc:
                raise SchemaError(f"bad record {key!r}") from exc
            if not isinstance(tau0, int) or not isinstance(gluing, list) or not all(
                isinstance(i, int) and not isinstance(i, bool) for i in gluing
            ):
                raise SchemaError(f"record {key!r} must hold integers only")
            db.records[g] = SurfaceRecord(g, tau0, tuple(gluing))
        return db

    def save(self, path) -> None:
        """Whole-file atomic write."""
        path = os.fspath(path)
        d = os.path.dirname(os.path.abspath(path))
        fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix=".json")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as fh:
                fh.write(self.dumps())
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise

    @classmethod
    def load(cls, path) -> "Database":
        with open(path, encoding="utf-8") as fh:
            return cls.loads(fh.read())


def upper_bound_length(genus: int) -> float:
    """``2 acosh(6g - 3)``: the one-cusp systole bound."""
    return 2.0 * math.acosh(6 * genus - 3)


SWEEP_COLUMNS = ["genus", "tau0", "systole", "upper_bound"]


def sweep_csv(db: Database) -> str:
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(SWEEP_COLUMNS)
    for rec in db:
        sys_len = systole(decode(rec), start=max(3, rec.tau0))[0]
        wr.writerow([rec.genus, rec.tau0, f"{sys_len:.12f}", f"{upper_bound_length(rec.genus):.12f}"])
    return buf.getvalue()
