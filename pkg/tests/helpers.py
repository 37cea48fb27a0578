"""Seeded random instance generators shared across the test suite.

Everything returns exact rationals so oracle comparisons are equalities,
never tolerances.
"""

from __future__ import annotations

import random
from fractions import Fraction

from prpd import MatrixForm, PseudoDist, RobustPrpd, Sampler, inf_norm
from prpd.bits import all_bits, int_to_bits


def rand_fraction(rng: random.Random, lo=-2, hi=2, den_bits=4) -> Fraction:
    den = 1 << rng.randrange(den_bits + 1)
    return Fraction(rng.randint(lo * den, hi * den), den)


def rand_matrix(rng: random.Random, w: int, lo=-1, hi=1, den_bits=4):
    return tuple(tuple(rand_fraction(rng, lo, hi, den_bits) for _ in range(w)) for _ in range(w))


def rand_stochastic(rng: random.Random, w: int):
    rows = []
    for _ in range(w):
        raw = [rng.randint(1, 16) for _ in range(w)]
        total = sum(raw)
        rows.append(tuple(Fraction(v, total) for v in raw))
    return tuple(rows)


def rand_substochastic(rng: random.Random, w: int):
    rows = []
    for _ in range(w):
        raw = [rng.randint(0, 16) for _ in range(w)]
        total = sum(raw) + rng.randint(1, 16)
        rows.append(tuple(Fraction(v, total) for v in raw))
    return tuple(rows)


def perturbed(rng: random.Random, base, bound) -> tuple:
    """base + E with inf_norm(E) <= bound exactly (equality on request)."""
    w = len(base)
    raw = rand_matrix(rng, w)
    nrm = inf_norm(raw)
    if nrm == 0:
        return base
    q = Fraction(rng.randint(0, 8), 8)
    scale = Fraction(bound) * q / nrm
    return tuple(tuple(b + scale * e for b, e in zip(rb, re)) for rb, re in zip(base, raw))


def rand_bits(rng: random.Random, width: int) -> str:
    return int_to_bits(rng.randrange(1 << width), width) if width else ""


def rand_pdist(rng: random.Random, out_len: int, size: int) -> PseudoDist:
    entries = tuple(
        (rand_bits(rng, out_len), rand_fraction(rng, -2, 2))
        for _ in range(size)
    )
    return PseudoDist(out_len, entries)


def rand_flat_map(rng: random.Random, m_bits: int, w: int, lo=-1, hi=1) -> MatrixForm:
    return MatrixForm.from_flat({z: rand_matrix(rng, w, lo, hi) for z in all_bits(m_bits)})


def rand_table_sampler(rng: random.Random, n: int, d: int, m: int) -> Sampler:
    table = {
        (x, s): rand_bits(rng, m)
        for x in all_bits(n)
        for s in all_bits(d)
    }

    def sample(x: str, s: str) -> str:
        return table[(x, s)]

    return Sampler(n=n, d=d, m=m, sample=sample, cert=None)


def rand_prpd(rng: random.Random, out_len: int, s_out: int, s_in: int, mu: int) -> RobustPrpd:
    """Frozen random generator table with random strings and signs."""
    table = {
        (x, y, i): (rand_bits(rng, out_len), rng.choice((1, -1)))
        for x in all_bits(s_out)
        for y in all_bits(s_in)
        for i in range(mu)
    }

    def gen(x: str, y: str, i: int):
        return table[(x, y, i)]

    return RobustPrpd(out_len=out_len, s_out=s_out, s_in=s_in, mu=mu, gen=gen)


def corrupted_uniform_prpd(out_len: int, s_in: int, corrupt_at: int = 0,
                           replacement: str | None = None) -> RobustPrpd:
    """Uniform generator over y[:out_len] except on one inner seed.

    Robust error is at most 2/2^s_in, so s_in tunes the accuracy grade
    while keeping weight 1.
    """
    if s_in < out_len:
        raise ValueError("need s_in >= out_len for the uniform part")
    bad_y = int_to_bits(corrupt_at, s_in)
    repl = replacement if replacement is not None else "1" * out_len

    def gen(x: str, y: str, i: int):
        if y == bad_y:
            return repl, 1
        return y[:out_len], 1

    return RobustPrpd(out_len=out_len, s_out=0, s_in=s_in, mu=1, gen=gen)


def weighted_exact_prpd(out_len: int, mu: int) -> RobustPrpd:
    """Exact uniform realization carrying an odd weight mu via cancelling pairs."""
    if mu % 2 != 1:
        raise ValueError("cancelling pairs need odd mu")

    def gen(x: str, y: str, i: int):
        # entries 1..(mu-1) cancel in +/- pairs; entry 0 carries the value
        if i == 0:
            return y, 1
        return y, 1 if i % 2 == 1 else -1

    return RobustPrpd(out_len=out_len, s_out=0, s_in=out_len, mu=mu, gen=gen)
