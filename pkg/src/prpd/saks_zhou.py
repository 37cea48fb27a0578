"""Snap rounding and recursive matrix powering with an offline approximator.

Snap shifts a value down by a seed-dependent multiple of 2^(-2d), floors to
the 2^(-d) grid and clamps at zero; it moves any non-negative value by less
than 2^(-d+1) and, crucially, two matrices within eps of each other snap to
the same result except with probability w^2*(2^d*eps + 2^(-d)) over the
offset. The powering chain alternates an approximate n1-th power with a
snap, so each level's input is (with high probability) a deterministic
function of the previous snapped matrix and not of the offline randomness.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Tuple

from .bits import all_bits, bits_to_int
from .errors import ContractError, InputError, check_capacity
from .pdist import RobustPrpd
from .robp import Mat, Robp, follow_path, mat_pow
from .sampler import Sampler, require_certified


@dataclass(frozen=True)
class SnapParams:
    d: int
    y: str

    def __post_init__(self):
        if self.d < 1:
            raise InputError("snap precision d must be at least 1")
        if len(self.y) != self.d or any(ch not in "01" for ch in self.y):
            raise InputError(f"offset must be a {self.d}-bit string")


def _offset_int(y, d: int) -> int:
    v = bits_to_int(y) if isinstance(y, str) else int(y)
    if not (0 <= v < 1 << d):
        raise InputError(f"offset {v} out of range [0, 2^{d})")
    return v


def snap_value(x, y, d: int) -> Fraction:
    """max(floor(x*2^d - 2^(-d)*y) * 2^(-d), 0); a multiple of 2^(-d)."""
    v = _offset_int(y, d)
    scale = 1 << d
    shifted = Fraction(x) * scale - Fraction(v, scale)
    return max(Fraction(math.floor(shifted), scale), Fraction(0))


def snap_matrix(m: Mat, y, d: int) -> Mat:
    v = _offset_int(y, d)
    return tuple(tuple(snap_value(e, v, d) for e in row) for row in m)


def snap_collision_rate(m: Mat, m2: Mat, d: int) -> Fraction:
    """Exact fraction of offsets on which the two matrices snap differently."""
    if len(m) != len(m2):
        raise InputError("matrices must have equal width")
    check_capacity((1 << d) * len(m) * len(m), "snap collision enumeration")
    collisions = sum(1 for v in range(1 << d) if snap_matrix(m, v, d) != snap_matrix(m2, v, d))
    return Fraction(collisions, 1 << d)


def snap_collision_bound(w: int, eps, d: int) -> Fraction:
    return w * w * ((1 << d) * Fraction(eps) + Fraction(1, 1 << d))


def snap_error_bound(d: int) -> Fraction:
    return Fraction(2, 1 << d)


# ---------------------------------------------------------------------------
# step program realizing a grid matrix


def _check_substochastic(m: Mat, what: str) -> None:
    for row in m:
        if any(e < 0 for e in row):
            raise InputError(f"{what} has a negative entry")
        if sum(row) > 1:
            raise InputError(f"{what} has a row sum above 1")


def robp_from_matrix(m: Mat, n1: int, d: int) -> Robp:
    """(n1, w+1, d) program whose restricted average is the n1-th power.

    Each of the w real states fans its 2^d labels across the successors in
    proportion to the grid entries; leftover labels go to an absorbing dummy
    state, so exact_average restricted to the real states equals M^n1.
    """
    if n1 < 1:
        raise InputError("n1 must be at least 1")
    w = len(m)
    scale = 1 << d
    _check_substochastic(m, "matrix")
    rows = []
    for i, row in enumerate(m):
        counts = []
        for j, e in enumerate(row):
            c = Fraction(e) * scale
            if c.denominator != 1:
                raise InputError(f"entry ({i},{j}) = {e} is not a multiple of 2^-{d}")
            counts.append(c.numerator)
        rows.append(counts)
    label_rows = []
    for v in range(scale):
        succ = []
        for i in range(w):
            target = w  # dummy
            acc = 0
            for j, c in enumerate(rows[i]):
                acc += c
                if v < acc:
                    target = j
                    break
            succ.append(target)
        succ.append(w)  # dummy state absorbs
        label_rows.append(tuple(succ))
    step = tuple(label_rows)
    return Robp(n=n1, w=w + 1, d_step=d, transitions=tuple(step for _ in range(n1)))


def round_to_grid(m: Mat, d: int) -> Mat:
    """Round every entry down to a multiple of 2^(-d)."""
    scale = 1 << d
    return tuple(tuple(Fraction(math.floor(Fraction(e) * scale), scale) for e in row) for row in m)


def grid_bits(n1: int, w: int, eps) -> int:
    """Smallest d with 2^d >= 3*n1*w/eps."""
    need = Fraction(3 * n1 * w) / Fraction(eps)
    d = 0
    while (1 << d) < need:
        d += 1
    return max(d, 1)


# ---------------------------------------------------------------------------
# the offline approximator built from a generator plus a sampler


def exact_power_approximator(n1: int) -> Callable[[Mat, str], Mat]:
    def pow_exact(m: Mat, y: str) -> Mat:
        return mat_pow(m, n1)

    return pow_exact


def armoni_pow(m: Mat, n1: int, prpd: RobustPrpd, samp: Sampler, y: str, eps,
               trust: bool = False) -> Mat:
    """Estimate M^n1 from offline randomness y.

    Rounds M to d = ceil(log2(3*n1*w/eps)) bits, builds the step program,
    and averages the generator's signed walk indicators over the sampler's
    selections: for at least a 1-eps fraction of y the result is within eps
    of M^n1 entrywise (one eps/3 loss each from rounding, the generator, and
    the sampler estimate).
    """
    eps = Fraction(eps)
    if eps <= 0:
        raise InputError("eps must be positive")
    w = len(m)
    _check_substochastic(m, "input matrix")
    d = grid_bits(n1, w, eps)
    m_grid = round_to_grid(m, d)
    program = robp_from_matrix(m_grid, n1, d)
    if prpd.out_len != n1 * d:
        raise ContractError(
            f"generator emits {prpd.out_len} bits, the step program consumes {n1 * d}"
        )
    if samp.m != prpd.seed_len:
        raise ContractError(f"sampler emits {samp.m} bits, generator seed is {prpd.seed_len}")
    require_certified(samp, eps / (6 * prpd.mu), eps / (w * w), trust=trust,
                      what="offline sampler")
    if len(y) != samp.n:
        raise InputError(f"offline randomness must be {samp.n} bits")
    check_capacity((1 << samp.d) * prpd.mu * w, "offline power estimate")
    acc = [[0] * w for _ in range(w)]
    cut = prpd.s_out
    for z in all_bits(samp.d):
        r = samp.sample(y, z)
        for i in range(prpd.mu):
            s, sign = prpd.gen(r[:cut], r[cut:], i)
            for start in range(w):
                end = follow_path(program, 0, start, s)
                if end < w:
                    acc[start][end] += sign
    inv = Fraction(1, 1 << samp.d)
    return tuple(tuple(e * inv for e in row) for row in acc)


# ---------------------------------------------------------------------------
# the powering schedule


@dataclass(frozen=True)
class SzSchedule:
    n1: int
    n2: int
    d: int
    eps: Fraction
    y: str
    offsets: Tuple[str, ...]

    def __post_init__(self):
        if self.n1 < 1 or self.n2 < 1:
            raise InputError("n1 and n2 must be at least 1")
        if self.d < 1:
            raise InputError("snap precision d must be at least 1")
        if len(self.offsets) != self.n2:
            raise InputError(f"need {self.n2} snap offsets, got {len(self.offsets)}")
        for z in self.offsets:
            if len(z) != self.d or any(ch not in "01" for ch in z):
                raise InputError(f"offset {z!r} is not a {self.d}-bit string")

    @property
    def n(self) -> int:
        return self.n1 ** self.n2


def sz_power(m: Mat, schedule: SzSchedule, approximator: Callable[[Mat, str], Mat],
             n: Optional[int] = None) -> Mat:
    """Alternate the approximator with snap: hat(M)_i = Snap(approx(hat(M)_{i-1}, y), z_i)."""
    if n is not None and schedule.n1 ** schedule.n2 != n:
        raise InputError(f"schedule computes the {schedule.n1}^{schedule.n2} power, not {n}")
    current = m
    for z in schedule.offsets:
        current = snap_matrix(approximator(current, schedule.y), z, schedule.d)
    return current


def sz_error_bound(n: int, w: int, d: int) -> Fraction:
    """Final accuracy of the snapped chain: n*w*2^(-d+1)."""
    return Fraction(2 * n * w, 1 << d)


def sz_failure_bound(w: int, n2: int, d: int, eps) -> Fraction:
    """Explicit two-events-per-level union bound over (y, z_1..z_n2)."""
    eps = Fraction(eps)
    return n2 * (eps + w * w * ((1 << d) * eps + Fraction(1, 1 << d)))
