#!/usr/bin/env python3
"""Telescoped-product error against its bound on the float backend.

Larger widths than the exact suite uses; floats are fine here because the
point is the scaling of slack, not exact verification.
"""

import argparse
import random

from prpd import inf_norm, mat_mul, mat_sub, telescoping_error_bound, telescoping_product


def random_stochastic(rng, w):
    rows = []
    for _ in range(w):
        raw = [rng.random() for _ in range(w)]
        total = sum(raw)
        rows.append(tuple(v / total for v in raw))
    return tuple(rows)


def perturbed(rng, base, bound):
    w = len(base)
    raw = [[rng.uniform(-1, 1) for _ in range(w)] for _ in range(w)]
    nrm = inf_norm(raw)
    scale = bound * rng.random() / nrm
    return tuple(tuple(b + scale * e for b, e in zip(rb, re)) for rb, re in zip(base, raw))


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--width", type=int, default=16)
    parser.add_argument("--trials", type=int, default=20)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()
    rng = random.Random(args.seed)
    print(f"{'gamma':>10} {'k':>3} {'worst error':>14} {'bound':>14} {'ratio':>8}")
    for gamma in (1 / 16, 1 / 64, 1 / 256):
        for k in range(5):
            worst = 0.0
            for _ in range(args.trials):
                a = random_stochastic(rng, args.width)
                b = random_stochastic(rng, args.width)
                approx_a = [perturbed(rng, a, gamma ** (i + 1)) for i in range(k + 1)]
                approx_b = [perturbed(rng, b, gamma ** (i + 1)) for i in range(k + 1)]
                result = telescoping_product(a, b, approx_a, approx_b, k)
                worst = max(worst, inf_norm(mat_sub(result, mat_mul(a, b))))
            bound = float(telescoping_error_bound(k, gamma))
            print(f"{gamma:>10.5f} {k:>3} {worst:>14.3e} {bound:>14.3e} {worst / bound:>8.3f}")


if __name__ == "__main__":
    main()
