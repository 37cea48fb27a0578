"""Read-once branching programs and their transition-matrix semantics.

A length-n width-w program reads d_step bits per step; each (step, label)
pair is a total successor map on the w states, equivalently a 0/1
row-stochastic matrix. Matrices are plain tuples of tuples so the same
helpers run exactly on Fractions and approximately on floats.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .bits import bits_to_int
from .errors import InputError, ParseError

Mat = tuple  # w-tuple of w-tuples of numbers


# ---------------------------------------------------------------------------
# exact matrix helpers


def freeze(rows: Iterable[Iterable]) -> Mat:
    return tuple(tuple(row) for row in rows)


def rational(rows: Iterable[Iterable]) -> Mat:
    """Coerce every entry to Fraction (the verification backend)."""
    return tuple(tuple(Fraction(e) for e in row) for row in rows)


def to_float(a: Mat) -> Mat:
    return tuple(tuple(float(e) for e in row) for row in a)


def identity(w: int) -> Mat:
    one, zero = Fraction(1), Fraction(0)
    return tuple(tuple(one if i == j else zero for j in range(w)) for i in range(w))


def zeros(w: int) -> Mat:
    zero = Fraction(0)
    return tuple(tuple(zero for _ in range(w)) for _ in range(w))


def mat_add(a: Mat, b: Mat) -> Mat:
    return tuple(tuple(x + y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


def mat_sub(a: Mat, b: Mat) -> Mat:
    return tuple(tuple(x - y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


def mat_scale(c, a: Mat) -> Mat:
    return tuple(tuple(c * x for x in row) for row in a)


def mat_mul(a: Mat, b: Mat) -> Mat:
    cols = tuple(zip(*b))
    return tuple(tuple(sum(x * y for x, y in zip(row, col)) for col in cols) for row in a)


def mat_pow(a: Mat, e: int) -> Mat:
    if e < 0:
        raise InputError("matrix power must be non-negative")
    result = identity(len(a))
    base = a
    while e:
        if e & 1:
            result = mat_mul(result, base)
        base = mat_mul(base, base) if e > 1 else base
        e >>= 1
    return result


def inf_norm(a: Mat):
    """Maximum absolute row sum."""
    return max(sum(abs(e) for e in row) for row in a)


def max_norm(a: Mat):
    """Maximum absolute entry; never exceeds inf_norm."""
    return max(abs(e) for row in a for e in row)


@dataclass(frozen=True)
class NormReport:
    inf_norm: Fraction
    max_norm: Fraction


def norm_report(a: Mat) -> NormReport:
    return NormReport(inf_norm=inf_norm(a), max_norm=max_norm(a))


# ---------------------------------------------------------------------------
# the program itself


@dataclass(frozen=True)
class Robp:
    """Layered branching program: transitions[t][label][state] -> state."""

    n: int
    w: int
    d_step: int
    transitions: tuple

    def __post_init__(self):
        if self.n < 1 or self.w < 1 or self.d_step < 1:
            raise InputError("Robp needs n >= 1, w >= 1, d_step >= 1")
        if len(self.transitions) != self.n:
            raise InputError(f"expected {self.n} steps, got {len(self.transitions)}")
        labels = 1 << self.d_step
        for t, step in enumerate(self.transitions):
            if len(step) != labels:
                raise InputError(f"step {t + 1} has {len(step)} label rows, expected {labels}")
            for v, row in enumerate(step):
                if len(row) != self.w:
                    raise InputError(f"step {t + 1} label {v} has {len(row)} successors, expected {self.w}")
                for s in row:
                    if not (0 <= s < self.w):
                        raise InputError(f"step {t + 1} label {v}: successor {s} out of range [0, {self.w})")

    @property
    def out_len(self) -> int:
        """Bits consumed by a full run."""
        return self.n * self.d_step


def _label_int(robp: Robp, label) -> int:
    if isinstance(label, str):
        if len(label) != robp.d_step:
            raise InputError(f"label {label!r} is not {robp.d_step} bits")
        return bits_to_int(label)
    v = int(label)
    if not (0 <= v < 1 << robp.d_step):
        raise InputError(f"label {v} out of range for d_step={robp.d_step}")
    return v


def step_matrix(robp: Robp, t: int, label) -> Mat:
    """0/1 row-stochastic matrix of step t (1-based) under the given label."""
    if not (1 <= t <= robp.n):
        raise InputError(f"step index {t} out of range [1, {robp.n}]")
    row = robp.transitions[t - 1][_label_int(robp, label)]
    one, zero = Fraction(1), Fraction(0)
    return tuple(tuple(one if row[i] == j else zero for j in range(robp.w)) for i in range(robp.w))


def _check_segment(robp: Robp, a: int, b: int) -> None:
    if not (0 <= a <= b <= robp.n):
        raise InputError(f"segment [{a}, {b}] out of range [0, {robp.n}]")


def walk_matrix(robp: Robp, a: int, b: int, r: str) -> Mat:
    """Product of step matrices along label string r (one 1 per row)."""
    _check_segment(robp, a, b)
    if len(r) != (b - a) * robp.d_step:
        raise InputError(f"label string has {len(r)} bits, expected {(b - a) * robp.d_step}")
    result = identity(robp.w)
    for t in range(a + 1, b + 1):
        chunk = r[(t - a - 1) * robp.d_step:(t - a) * robp.d_step]
        result = mat_mul(result, step_matrix(robp, t, chunk))
    return result


def follow_path(robp: Robp, a: int, state: int, r: str) -> int:
    """End state reached from `state` at layer a reading r; O(steps)."""
    d = robp.d_step
    for idx in range(len(r) // d):
        label = bits_to_int(r[idx * d:(idx + 1) * d])
        state = robp.transitions[a + idx][label][state]
    return state


def exact_average(robp: Robp, a: int, b: int) -> Mat:
    """Uniform random-walk matrix of the segment; row-stochastic, exact."""
    _check_segment(robp, a, b)
    labels = 1 << robp.d_step
    inv = Fraction(1, labels)
    result = identity(robp.w)
    for t in range(a, b):
        step = robp.transitions[t]
        counts = [[0] * robp.w for _ in range(robp.w)]
        for row in step:
            for i, j in enumerate(row):
                counts[i][j] += 1
        avg = tuple(tuple(c * inv for c in row) for row in counts)
        result = mat_mul(result, avg)
    return result


# ---------------------------------------------------------------------------
# construction and I/O


def random_robp(n: int, w: int, d_step: int = 1, seed: int = 0) -> Robp:
    """Deterministic given seed."""
    rng = random.Random(seed)
    steps = tuple(
        tuple(tuple(rng.randrange(w) for _ in range(w)) for _ in range(1 << d_step))
        for _ in range(n)
    )
    return Robp(n=n, w=w, d_step=d_step, transitions=steps)


def identity_robp(n: int, w: int, d_step: int = 1) -> Robp:
    step = tuple(tuple(range(w)) for _ in range(1 << d_step))
    return Robp(n=n, w=w, d_step=d_step, transitions=tuple(step for _ in range(n)))


def swap_on_one_robp(n: int) -> Robp:
    """Width-2 program where label 1 swaps the two states."""
    step = ((0, 1), (1, 0))
    return Robp(n=n, w=2, d_step=1, transitions=tuple(step for _ in range(n)))


def serialize_robp(robp: Robp) -> str:
    lines = [f"robp {robp.n} {robp.w} {robp.d_step}"]
    for t in range(robp.n):
        for v in range(1 << robp.d_step):
            lines.append(" ".join(str(s) for s in robp.transitions[t][v]))
    return "\n".join(lines) + "\n"


def parse_robp(text: str) -> Robp:
    rows = []
    header = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if header is None:
            parts = line.split()
            if len(parts) != 4 or parts[0] != "robp":
                raise ParseError("header must be 'robp n w d_step'", line=lineno)
            try:
                n, w, d_step = int(parts[1]), int(parts[2]), int(parts[3])
            except ValueError:
                raise ParseError("header fields must be integers", line=lineno) from None
            if n < 1 or w < 1 or d_step < 1:
                raise ParseError("header fields must be positive", line=lineno)
            header = (n, w, d_step)
            continue
        fields = line.split()
        n, w, d_step = header
        if len(fields) != w:
            raise ParseError(f"expected {w} successors, got {len(fields)}", line=lineno)
        row = []
        for fieldno, f in enumerate(fields, start=1):
            try:
                s = int(f)
            except ValueError:
                raise ParseError(f"successor {f!r} is not an integer", line=lineno, field=fieldno) from None
            if not (0 <= s < w):
                raise ParseError(f"successor {s} out of range [0, {w})", line=lineno, field=fieldno)
            row.append(s)
        rows.append(tuple(row))
    if header is None:
        raise ParseError("missing header line", line=1)
    n, w, d_step = header
    labels = 1 << d_step
    if len(rows) != n * labels:
        raise ParseError(f"expected {n * labels} successor rows, got {len(rows)}")
    steps = tuple(tuple(rows[t * labels + v] for v in range(labels)) for t in range(n))
    return Robp(n=n, w=w, d_step=d_step, transitions=steps)
