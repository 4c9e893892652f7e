"""Random regular covers of the cusped torus and word statistics.

    python3 scripts/cover_experiments.py --seed 0 --samples 200

Prints the distribution of cover systole traces for SL(2, p), the number of
genus-2 surface group homomorphisms into SL(2, p) next to the character
formula, and mean fixed-point counts for a few words under random
permutation representations.
"""

import argparse
from collections import Counter
from fractions import Fraction

from randsys.covers import (
    count_surface_homs,
    cover_systole,
    fixed_point_stats,
    sample_hom,
    stats_csv,
)
from randsys.groups import SL2, character_degrees
from randsys.process import attempt_rng
from randsys.surface import standard_torus


def systole_distribution(p, samples, seed):
    base = standard_torus()
    group = SL2(p)
    rng = attempt_rng(seed, p, 0)
    hist = Counter()
    surjective = 0
    for _ in range(samples):
        hom = sample_hom(base, group, rng)
        surjective += hom.is_surjective
        hist[cover_systole(base, hom).trace] += 1
    return hist, surjective


def hom_count_table(primes, genus=2):
    rows = []
    for p in primes:
        g = SL2(p)
        degrees = character_degrees(g)
        formula = g.order ** (2 * genus - 1) * sum(Fraction(1, d ** (2 * genus - 2)) for d in degrees)
        rows.append((p, g.order, count_surface_homs(genus, g), formula))
    return rows


def parse_args(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--samples", type=int, default=200)
    ap.add_argument("--primes", default="2,3,5")
    ap.add_argument("--degrees", default="50,100,200")
    ap.add_argument("--words", default="a,ab,aaB,abAB")
    ap.add_argument("--fix-samples", type=int, default=20000)
    return ap.parse_args(argv)


if __name__ == "__main__":
    args = parse_args()
    primes = [int(x) for x in args.primes.split(",")]
    for p in primes:
        hist, surj = systole_distribution(p, args.samples, args.seed)
        shown = ", ".join(f"{t}: {c}" for t, c in sorted(hist.items()))
        print(f"SL(2,{p}) covers of the torus, {args.samples} samples ({surj} surjective): trace counts {shown}")
    print()
    print("p, |G|, genus-2 homs (exhaustive), |G|^3 zeta(2)")
    for row in hom_count_table(primes):
        print(", ".join(str(x) for x in row))
    print()
    rng = attempt_rng(args.seed, 0, 1)
    degrees = [int(x) for x in args.degrees.split(",")]
    rows = []
    for w in args.words.split(","):
        rows.extend(fixed_point_stats(None, degrees, w, args.fix_samples, rng))
    print(stats_csv(rows), end="")
