"""Command line interface: generate, sweep, verify, covers.

Exit codes: 0 success, 1 verification or oracle mismatch, 2 generation
failure, 64 usage error, 65 malformed input data.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import covers as cov
from .database import Database, SchemaError, decode, encode, sweep_csv, verify
from .groups import make_group
from .process import ProcessConfig, SeedTooShortError, attempt_rng, run, search_with_retries
from .surface import split_components, standard_torus, systole

EX_OK = 0
EX_MISMATCH = 1
EX_FAILED = 2
EX_USAGE = 64
EX_DATAERR = 65


class UsageError(Exception):
    pass


class Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EX_USAGE, f"{self.prog}: error: {message}\n")


def _genus_range(text: str) -> range:
    for sep in (":", "-", ".."):
        if sep in text:
            lo, hi = text.split(sep, 1)
            break
    else:
        lo = hi = text
    try:
        lo_i, hi_i = int(lo), int(hi)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad genus range {text!r}") from None
    if lo_i < 1 or hi_i < lo_i:
        raise argparse.ArgumentTypeError(f"empty or invalid genus range {text!r}")
    return range(lo_i, hi_i + 1)


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def _degrees(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad degree list {text!r}") from None


def build_parser() -> Parser:
    ap = Parser(prog="randsys", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True, parser_class=Parser)

    g = sub.add_parser("generate", help="run the gluing process")
    g.add_argument("--genus", type=_positive, help="search a one-cusp surface of this genus")
    g.add_argument("--n", type=_positive, help="number of triangle pairs for a single run")
    g.add_argument("--tau0", type=int, help="trace threshold (with --n) or starting threshold (with --genus)")
    g.add_argument("--variant", choices=["plain", "fixed_genus"], default="plain")
    g.add_argument("--forbid-pure-l", action="store_true", help="never close a boundary cusp early")
    g.add_argument("--seed", type=int, required=True)
    g.add_argument("--attempts", type=_positive, default=75)
    g.add_argument("--threads", type=_positive, default=1)
    g.add_argument("--db", help="add the result to this database")

    s = sub.add_parser("sweep", help="best surfaces over a range of genera")
    s.add_argument("--genus-range", type=_genus_range, required=True, help="e.g. 2:15")
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--out", required=True, help="CSV output")
    s.add_argument("--db", required=True, help="database to create or update")
    s.add_argument("--attempts", type=_positive, default=75)
    s.add_argument("--threads", type=_positive, default=1)

    v = sub.add_parser("verify", help="check every record of a database")
    v.add_argument("--db", required=True)

    c = sub.add_parser("covers", help="random regular covers")
    c.add_argument("--group", choices=["sl2", "sym", "trivial"], required=True)
    c.add_argument("--p", type=int, default=3, help="prime for SL(2, p)")
    c.add_argument("--n", type=_degrees, default=[50, 100, 200], help="comma-separated degrees for Sym(n)")
    c.add_argument("--base-db-genus", type=int, default=1, help="genus of the base (1 = two-triangle torus)")
    c.add_argument("--db", help="database holding the base surface")
    c.add_argument("--cap", type=float, help="length cap for the cover systole")
    c.add_argument("--samples", type=_positive, default=20)
    c.add_argument("--words", default="a,ab,aaB", help="generator words for fixed-point statistics")
    c.add_argument("--oracle", action="store_true", help="compare with the explicitly built cover")
    c.add_argument("--seed", type=int, required=True)
    c.add_argument("--out", help="write output here instead of stdout")
    return ap


def _emit(text: str, out=None):
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _outcome_json(o) -> dict:
    return {
        "n": o.n,
        "tau0": o.tau0,
        "variant": o.variant,
        "saturated": o.saturated,
        "verified": o.verified,
        "t_max": o.t_max,
        "genus": o.genus,
        "cusps": o.cusps,
        "systole": o.systole,
        "systole_trace": o.systole_trace,
        "systole_word": o.systole_word,
        "attempts_used": o.attempts_used,
        "seed": o.seed,
        "attempt": o.attempt,
        "gluing": list(o.surface.pairing),
    }


def _load_db(path) -> Database:
    try:
        return Database.load(path)
    except (OSError, SchemaError) as exc:
        raise SchemaError(f"cannot read database {path}: {exc}") from exc


def cmd_generate(args) -> int:
    if (args.genus is None) == (args.n is None):
        raise UsageError("give exactly one of --genus and --n")
    if args.genus is not None:
        out = search_with_retries(args.genus, args.seed, tau_start=args.tau0,
                                  max_attempts=args.attempts, threads=args.threads,
                                  forbid_pure_L_closures=args.forbid_pure_l)
        ok = out.saturated and out.verified
        doc = _outcome_json(out)
        if ok:
            rec = encode(out.surface, out.tau0)
            doc["record"] = rec.to_json()
            if args.db:
                db = _load_db(args.db) if os.path.exists(args.db) else Database()
                db.add(rec)
                db.save(args.db)
        print(json.dumps(doc, sort_keys=True))
        return EX_OK if ok else EX_FAILED
    if args.tau0 is None:
        raise UsageError("--n needs --tau0")
    try:
        cfg = ProcessConfig(n=args.n, tau0=args.tau0, variant=args.variant, seed=args.seed,
                            max_attempts=args.attempts, forbid_pure_L_closures=args.forbid_pure_l)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    out = None
    try:
        for k in range(cfg.max_attempts):
            out = run(cfg, attempt=k)
            out.attempts_used = k + 1
            if out.saturated:
                break
    except SeedTooShortError as exc:
        print(f"randsys: {exc}", file=sys.stderr)
        return EX_FAILED
    print(json.dumps(_outcome_json(out), sort_keys=True))
    return EX_OK if out.saturated and out.verified else EX_FAILED


def cmd_sweep(args) -> int:
    db = _load_db(args.db) if os.path.exists(args.db) else Database()
    failed = []
    for g in args.genus_range:
        out = search_with_retries(g, args.seed, max_attempts=args.attempts, threads=args.threads)
        if out.saturated and out.verified:
            db.add(encode(out.surface, out.tau0))
            print(f"genus {g}: tau0 {out.tau0}, systole {out.systole:.6f}, attempts {out.attempts_used}")
        else:
            failed.append(g)
            print(f"genus {g}: no surface found", file=sys.stderr)
    db.save(args.db)
    wanted = Database([r for r in db if r.genus in args.genus_range])
    _emit(sweep_csv(wanted), args.out)
    return EX_FAILED if failed else EX_OK


def cmd_verify(args) -> int:
    db = _load_db(args.db)
    bad = 0
    for rec in db:
        rep = verify(rec)
        bad += not rep.passed
        print(json.dumps(rep.to_json(), sort_keys=True))
    return EX_MISMATCH if bad else EX_OK


def _base_surface(args):
    if args.db:
        db = _load_db(args.db)
        if args.base_db_genus not in db.records:
            raise SchemaError(f"database has no genus {args.base_db_genus}")
        return decode(db.records[args.base_db_genus])
    if args.base_db_genus != 1:
        raise UsageError("bases other than the genus-1 torus need --db")
    return standard_torus()


def oracle_trace(base, hom) -> int:
    """Systole trace of the explicitly built cover, minimised over components."""
    traces = []
    for comp in split_components(cov.build_cover(base, hom)):
        traces.append(systole(comp)[1].trace)
    return min(traces)


def cmd_covers(args) -> int:
    rng = attempt_rng(args.seed, 0, 0)
    if args.group == "sym":
        rows = []
        for w in args.words.split(","):
            rows.extend(cov.fixed_point_stats(None, args.n, w, args.samples, rng))
        _emit(cov.stats_csv(rows), args.out)
        return EX_OK
    try:
        group = make_group(args.group, args.p)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    base = _base_surface(args)
    lines = []
    mismatch = 0
    for i in range(args.samples):
        hom = cov.sample_hom(base, group, rng)
        geo = cov.cover_systole(base, hom, max_length=args.cap)
        doc = {"sample": i, "images": [list(x) for x in hom.images], "surjective": hom.is_surjective,
               "systole": geo.to_json() if geo else None}
        if args.oracle:
            t = oracle_trace(base, hom)
            doc["oracle_trace"] = t
            doc["match"] = geo is not None and geo.trace == t
            mismatch += not doc["match"]
        lines.append(json.dumps(doc, sort_keys=True))
    _emit("\n".join(lines) + "\n", args.out)
    return EX_MISMATCH if mismatch else EX_OK


COMMANDS = {"generate": cmd_generate, "sweep": cmd_sweep, "verify": cmd_verify, "covers": cmd_covers}


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        ap.print_usage(sys.stderr)
        print(f"randsys: error: {exc}", file=sys.stderr)
        return EX_USAGE
    except SchemaError as exc:
        print(f"randsys: data error: {exc}", file=sys.stderr)
        return EX_DATAERR


if __name__ == "__main__":
    sys.exit(main())
