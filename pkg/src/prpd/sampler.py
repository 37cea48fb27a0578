"""Averaging samplers as a certified interface.

A sampler g: {0,1}^n x {0,1}^d -> {0,1}^m estimates the mean of any bounded
function over {0,1}^m from the 2^d samples selected by an outer input x.
Certification is by brute force: for each x the total variation distance
between the sample multiset and uniform is the exact worst case over
[0,1]-valued test functions, so the per-x TV profile decides the (eps,
delta) property outright. Constructions refuse samplers that do not carry
a covering certificate.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, Optional, Tuple

from .bits import all_bits, bits_to_int, int_to_bits
from .errors import ContractError, InputError, check_capacity
from .pdist import FormStats, MatrixForm
from .robp import Mat, inf_norm, mat_mul, mat_scale, zeros

METHOD_BRUTE = "brute-force"
METHOD_ANALYTIC = "analytic"
METHOD_ASSUMED = "assumed"


@dataclass(frozen=True)
class Certificate:
    eps: Fraction
    delta: Fraction
    method: str
    max_tv: Optional[Fraction] = None
    bad_x_count: Optional[int] = None

    def covers(self, eps, delta) -> bool:
        """Certificates are monotone: (eps, delta) covers anything weaker."""
        return self.eps <= Fraction(eps) and self.delta <= Fraction(delta)


@dataclass
class Sampler:
    n: int
    d: int
    m: int
    sample: Callable[[str, str], str]
    cert: Optional[Certificate] = None


@dataclass(frozen=True)
class TvProfile:
    """Per-outer-input total variation distance from uniform."""

    m: int
    per_x: Tuple[Fraction, ...]

    @property
    def max_tv(self) -> Fraction:
        return max(self.per_x)

    def bad_count(self, eps) -> int:
        eps = Fraction(eps)
        return sum(1 for tv in self.per_x if tv > eps)

    def bad_fraction(self, eps) -> Fraction:
        return Fraction(self.bad_count(eps), len(self.per_x))


def enumeration_sampler(m: int, n: int = 0) -> Sampler:
    """d = m and g(x, s) = s: exact for every x, a (0, 0)-sampler."""

    def sample(x: str, s: str) -> str:
        return s

    cert = Certificate(eps=Fraction(0), delta=Fraction(0), method=METHOD_ANALYTIC,
                       max_tv=Fraction(0), bad_x_count=0)
    return Sampler(n=n, d=m, m=m, sample=sample, cert=cert)


def expander_walk_sampler(n: int, d: int, m: int, seed: int = 0) -> Sampler:
    """Heuristic walk over Z_{2^m}; returned uncertified, certify before use.

    The outer input folds to a start vertex, the seed drives affine steps.
    The degenerate d = m case passes the seed straight through.
    """
    if n < 0 or d < 0 or m < 1:
        raise InputError("expander_walk_sampler needs n, d >= 0 and m >= 1")
    size = 1 << m
    salt = (seed * 0x9E3779B1 + 0x85EBCA77) % size

    if d == m:
        def sample(x: str, s: str) -> str:
            return s
        return Sampler(n=n, d=d, m=m, sample=sample, cert=None)

    def fold(x: str) -> int:
        v = salt
        for pos in range(0, len(x), m):
            v ^= bits_to_int(x[pos:pos + m])
        return v % size

    def sample(x: str, s: str) -> str:
        v = fold(x)
        for pos in range(0, len(s) - 1, 2):
            c = bits_to_int(s[pos:pos + 2])
            if c == 0:
                v = v + 1
            elif c == 1:
                v = v - 1
            elif c == 2:
                v = 5 * v + 3
            else:
                v = 3 * v + 1
            v %= size
        if len(s) % 2:
            v = (v + (1 if s[-1] == "1" else size - 1)) % size
        return int_to_bits(v, m)

    return Sampler(n=n, d=d, m=m, sample=sample, cert=None)


def tv_profile(g: Sampler) -> TvProfile:
    """Exact TV(p_x, uniform) for every x, by full enumeration."""
    check_capacity((1 << g.n) * (1 << g.d), "sampler TV profile")
    half = Fraction(1, 2)
    unif = Fraction(1, 1 << g.m)
    inv_d = Fraction(1, 1 << g.d)
    per_x = []
    for x in all_bits(g.n):
        counts: Dict[str, int] = {}
        for s in all_bits(g.d):
            out = g.sample(x, s)
            if len(out) != g.m:
                raise ContractError(f"sampler output {out!r} is not {g.m} bits")
            counts[out] = counts.get(out, 0) + 1
        hit_mass = sum(abs(c * inv_d - unif) for c in counts.values())
        miss_mass = ((1 << g.m) - len(counts)) * unif
        per_x.append(half * (hit_mass + miss_mass))
    return TvProfile(m=g.m, per_x=tuple(per_x))


def certify(g: Sampler, eps, delta) -> Tuple[bool, TvProfile]:
    """Brute-force verdict: at most a delta fraction of x may exceed TV eps.

    On success the sampler's certificate is replaced with the brute-force
    record at exactly (eps, delta).
    """
    eps, delta = Fraction(eps), Fraction(delta)
    if eps < 0 or delta < 0:
        raise InputError("eps and delta must be non-negative")
    profile = tv_profile(g)
    bad = profile.bad_count(eps)
    ok = Fraction(bad, 1 << g.n) <= delta
    if ok:
        g.cert = Certificate(eps=eps, delta=delta, method=METHOD_BRUTE,
                             max_tv=profile.max_tv, bad_x_count=bad)
    return ok, profile


def require_certified(g: Sampler, eps, delta, trust: bool = False, what: str = "sampler") -> None:
    if g.cert is None:
        raise ContractError(f"{what} is uncertified; run certify() first")
    if g.cert.method == METHOD_ASSUMED and not trust:
        raise ContractError(f"{what} carries an assumed certificate; pass trust=True to accept it")
    if not g.cert.covers(eps, delta):
        raise ContractError(
            f"{what} certified at ({g.cert.eps}, {g.cert.delta}), "
            f"needs ({Fraction(eps)}, {Fraction(delta)})"
        )


def estimate_scalar(g: Sampler, f: Callable[[str], object], x: str, trust: bool = False):
    """E_s[f(g(x, s))]; within eps*(range width) of the true mean off a delta set."""
    if g.cert is None or (g.cert.method == METHOD_ASSUMED and not trust):
        raise ContractError("estimate_scalar needs a certified sampler")
    total = Fraction(0)
    for s in all_bits(g.d):
        total += Fraction(f(g.sample(x, s)))
    return total / (1 << g.d)


def estimate_matrix(g: Sampler, flat: MatrixForm, x: str, trust: bool = False) -> Mat:
    """E_s[A(g(x, s))] for a flattened form over {0,1}^m.

    For all but a w^2*delta fraction of x the result is within
    2*w*mu(A)*eps of the true average, in infinity norm.
    """
    if flat.s_in != 0:
        raise ContractError("estimate_matrix consumes flattened forms only; flatten first")
    if flat.s_out != g.m:
        raise InputError(f"form indexed by {flat.s_out} bits, sampler emits {g.m}")
    if g.cert is None or (g.cert.method == METHOD_ASSUMED and not trust):
        raise ContractError("estimate_matrix needs a certified sampler")
    acc = zeros(flat.w)
    for s in all_bits(g.d):
        m = flat.flat_at(g.sample(x, s))
        acc = tuple(tuple(p + q for p, q in zip(ra, rb)) for ra, rb in zip(acc, m))
    return mat_scale(Fraction(1, 1 << g.d), acc)


# ---------------------------------------------------------------------------
# product rules: worst-case bounds for sampler-estimated matrix products.
# LHS quantities are computed exactly by enumeration in the tests; the
# bounds below are the certified-parameter forms the construction relies on.


def sampled_average(mapping: MatrixForm, g: Sampler, z: str) -> Mat:
    """E_over_seed[A(g(z, seed))] without certificate checks (analysis helper)."""
    acc = zeros(mapping.w)
    for s in all_bits(g.d):
        m = mapping.flat_at(g.sample(z, s))
        acc = tuple(tuple(p + q for p, q in zip(ra, rb)) for ra, rb in zip(acc, m))
    return mat_scale(Fraction(1, 1 << g.d), acc)


def symmetric_product_bound(stats_a: FormStats, stats_b: FormStats,
                            cert_a: Certificate, cert_b: Certificate, w: int) -> Fraction:
    """Sampler on both sides: failure mass + product of inflated norms."""
    fail = w * w * (cert_a.delta + cert_b.delta) * stats_a.weight * stats_b.weight
    good_a = stats_a.norm + 2 * w * stats_a.weight * cert_a.eps
    good_b = stats_b.norm + 2 * w * stats_b.weight * cert_b.eps
    return fail + good_a * good_b


def left_product_bound(stats_a: FormStats, stats_b: FormStats,
                       cert_b: Certificate, w: int) -> Fraction:
    """Sampler on the right side only; the left side contributes its robust norm."""
    fail = w * w * cert_b.delta * stats_a.weight * stats_b.weight
    good_b = stats_b.norm + 2 * w * stats_b.weight * cert_b.eps
    return fail + stats_a.robust_norm * good_b


def right_product_bound(stats_a: FormStats, stats_b: FormStats,
                        cert_a: Certificate, w: int) -> Fraction:
    """Sampler on the left side only; mirror of the left rule."""
    fail = w * w * cert_a.delta * stats_a.weight * stats_b.weight
    good_a = stats_a.norm + 2 * w * stats_a.weight * cert_a.eps
    return fail + good_a * stats_b.robust_norm


def symmetric_product_error(map_a: MatrixForm, map_b: MatrixForm,
                            f: Sampler, g: Sampler) -> Fraction:
    """E_z || E_x[A(f(z,x))] * E_y[B(g(z,y))] ||, exact."""
    if f.n != g.n:
        raise InputError("both samplers must share the outer seed length")
    total = Fraction(0)
    for z in all_bits(f.n):
        total += inf_norm(mat_mul(sampled_average(map_a, f, z), sampled_average(map_b, g, z)))
    return total / (1 << f.n)


def left_product_error(map_a: MatrixForm, map_b: MatrixForm, g: Sampler) -> Fraction:
    """E_z || A(z) * E_y[B(g(z,y))] ||, exact; A is indexed by z directly."""
    if map_a.s_out != g.n:
        raise InputError("left mapping must be indexed by the sampler's outer input")
    total = Fraction(0)
    for z in all_bits(g.n):
        total += inf_norm(mat_mul(map_a.flat_at(z), sampled_average(map_b, g, z)))
    return total / (1 << g.n)


def right_product_error(map_a: MatrixForm, map_b: MatrixForm, f: Sampler) -> Fraction:
    """E_z || E_x[A(f(z,x))] * B(z) ||, exact; B is indexed by z directly."""
    if map_b.s_out != f.n:
        raise InputError("right mapping must be indexed by the sampler's outer input")
    total = Fraction(0)
    for z in all_bits(f.n):
        total += inf_norm(mat_mul(sampled_average(map_a, f, z), map_b.flat_at(z)))
    return total / (1 << f.n)
