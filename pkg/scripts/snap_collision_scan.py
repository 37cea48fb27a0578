#!/usr/bin/env python3
"""Measured snap-collision rates against the w^2*(2^d*eps + 2^-d) bound.

Reports the worst measured/bound ratio per precision, i.e. the effective
constant in front of the union-bound expression.
"""

import argparse
import random
from fractions import Fraction

from prpd import mat_sub, max_norm, snap_collision_bound, snap_collision_rate


def random_substochastic(rng, w):
    rows = []
    for _ in range(w):
        raw = [rng.randint(0, 16) for _ in range(w)]
        total = sum(raw) + rng.randint(1, 16)
        rows.append(tuple(Fraction(v, total) for v in raw))
    return tuple(rows)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--pairs", type=int, default=50)
    parser.add_argument("--width", type=int, default=2)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()
    rng = random.Random(args.seed)
    print(f"{'d':>3} {'worst rate':>12} {'worst bound':>12} {'max ratio':>10}")
    for d in range(2, 9):
        worst_ratio = 0.0
        worst = (Fraction(0), Fraction(1))
        for _ in range(args.pairs):
            m = random_substochastic(rng, args.width)
            shift = Fraction(rng.randint(0, 6), 1 << rng.randint(4, 10))
            m2 = tuple(tuple(min(e + shift * rng.randint(0, 1), Fraction(1)) for e in row)
                       for row in m)
            eps = max_norm(mat_sub(m, m2))
            rate = snap_collision_rate(m, m2, d)
            bound = snap_collision_bound(args.width, eps, d)
            ratio = float(rate / bound)
            if ratio > worst_ratio:
                worst_ratio, worst = ratio, (rate, bound)
        print(f"{d:>3} {str(worst[0]):>12} {str(worst[1]):>12} {worst_ratio:>10.3f}")


if __name__ == "__main__":
    main()
