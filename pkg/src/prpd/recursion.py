"""Recursive construction of robust generators with seed/weight accounting.

One merge level combines graded approximations of the two half segments
through the telescoping combination sum_{i+j=k} A_i B_j - sum_{i+j=k-1}
A_i B_j. Low indices (i <= ceil(k/2)) are flattened and re-selected through
an averaging sampler driven by the outer seed; high indices pass the outer
seed through directly. The ledger records, per node, the seed lengths and
weight actually used next to the inductive bounds they must stay under.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from .bits import all_bits, suffix
from .errors import ConstructionError, ContractError, InputError
from .pdist import RobustPrpd, flatten, matrix_form, pad_seeds, robust_form, uniform_prpd
from .robp import Mat, Robp, exact_average, inf_norm, mat_mul, mat_sub, zeros
from .sampler import Sampler, certify, enumeration_sampler

MODE_EXACT = "exact-enumeration"
MODE_CERTIFIED = "certified-backend"


# ---------------------------------------------------------------------------
# telescoping product of graded approximations


def telescoping_product(a: Mat, b: Mat, a_approx: Sequence[Mat], b_approx: Sequence[Mat], k: int) -> Mat:
    """sum_{i+j=k} A_i B_j - sum_{i+j=k-1} A_i B_j.

    With ||A||, ||B|| <= 1 and ||A_i - A||, ||B_i - B|| <= gamma^(i+1) the
    result is within (k+2)*gamma^(k+1) + (k+1)*gamma^(k+2) of AB.
    """
    if k < 0:
        raise InputError("k must be non-negative")
    if len(a_approx) < k + 1 or len(b_approx) < k + 1:
        raise InputError(f"need approximation lists of length at least {k + 1}")
    w = len(a)
    if len(b) != w or any(len(m) != w for m in list(a_approx[:k + 1]) + list(b_approx[:k + 1])):
        raise InputError("all matrices must share the same width")
    total = zeros(w)
    for i in range(k + 1):
        term = mat_mul(a_approx[i], b_approx[k - i])
        total = tuple(tuple(p + q for p, q in zip(r, s)) for r, s in zip(total, term))
    for i in range(k):
        term = mat_mul(a_approx[i], b_approx[k - 1 - i])
        total = tuple(tuple(p - q for p, q in zip(r, s)) for r, s in zip(total, term))
    return total


def telescoping_error_bound(k: int, gamma) -> Fraction:
    gamma = Fraction(gamma)
    return (k + 2) * gamma ** (k + 1) + (k + 1) * gamma ** (k + 2)


# ---------------------------------------------------------------------------
# hypotheses of one merge level


def ck_requirements(m_bits: int, w: int, k: int, gamma) -> Tuple[Tuple[Fraction, ...], Fraction, int]:
    """Per-index sampler accuracy eps_i, shared failure delta, binding index.

    delta takes the most conservative reading: the minimum over sampled
    indices i <= ceil(k/2), i.e. the largest binomial; the index attaining
    it is returned.
    """
    gamma = Fraction(gamma)
    cap = (k + 1) // 2
    eps = tuple(gamma ** (i + 1) / (w * comb(m_bits - 1, i)) for i in range(cap + 1))
    binding = max(range(cap + 1), key=lambda i: comb(2 * m_bits - 1, i))
    delta = gamma ** (k + 1) / (w * w * comb(2 * m_bits - 1, binding))
    return eps, delta, binding


@dataclass(frozen=True)
class SamplerSlot:
    i: int
    out_bits: int
    n: int
    d: int
    eps_required: Fraction
    delta_required: Fraction
    cert_method: str
    cert_eps: Fraction
    cert_delta: Fraction


@dataclass
class CkBuild:
    """One merge level: the generator plus everything the ledger records."""

    prpd: RobustPrpd
    m_bits: int
    w: int
    k: int
    gamma: Fraction
    split: int                       # ceil(k/2): last sampled index
    terms: Tuple[Tuple[int, int, int], ...]   # (i, j, sign), positives then negatives
    len_a: Tuple[int, ...]
    len_b: Tuple[int, ...]
    samplers: Tuple[Sampler, ...]
    slots: Tuple["SamplerSlot", ...]
    eps_required: Tuple[Fraction, ...]
    delta_required: Fraction
    delta_binding_i: int
    child_summaries: Tuple[Tuple[int, int, int], ...]   # (s_out, s_in, mu) per index
    a_entry: Callable = field(repr=False, default=None)
    b_entry: Callable = field(repr=False, default=None)

    def a_bundle(self, i: int, x: str, y: str):
        return [self.a_entry(i, x, y, t) for t in range(self.child_summaries[i][2])]

    def b_bundle(self, j: int, x: str, y: str):
        return [self.b_entry(j, x, y, t) for t in range(self.child_summaries[j][2])]


def build_ck(a_children: Sequence[RobustPrpd], b_children: Sequence[RobustPrpd],
             w: int, gamma, samplers: Optional[Sequence[Sampler]] = None,
             trust: bool = False) -> CkBuild:
    """Merge graded half-segment generators into one for the doubled segment.

    a_children[i] and b_children[i] must be gamma^(i+1)-robust generators
    for the left and right halves with weight at most binom(m-1, i); the
    result approximates the product with robust error (11*gamma)^(k+1) and
    weight at most binom(2m-1, k). Every violated hypothesis raises a
    ConstructionError naming the inequality. Passing samplers=None installs
    exact enumeration samplers (certified at (0, 0) analytically).
    """
    k = len(a_children) - 1
    if k < 0 or len(b_children) != k + 1:
        raise InputError("need approximation families A_0..A_k and B_0..B_k")
    gamma = Fraction(gamma)
    if gamma <= 0:
        raise InputError("gamma must be positive")
    m_bits = a_children[0].out_len
    for side, fam in (("A", a_children), ("B", b_children)):
        for i, child in enumerate(fam):
            if child.out_len != m_bits:
                raise InputError(f"{side}_{i} emits {child.out_len} bits, expected {m_bits}")
            cap = comb(m_bits - 1, i)
            if child.mu > cap:
                raise ConstructionError(
                    f"weight hypothesis mu({side}_{i}) <= binom(m-1, i) fails: "
                    f"{child.mu} > binom({m_bits - 1}, {i}) = {cap}"
                )
    split = (k + 1) // 2
    for i in range(split + 1):
        if a_children[i].seed_len != b_children[i].seed_len:
            raise ConstructionError(
                f"sampled index {i} needs equal seed lengths on both sides: "
                f"s(A_{i}) = {a_children[i].seed_len}, s(B_{i}) = {b_children[i].seed_len}"
            )

    eps_req, delta_req, binding = ck_requirements(m_bits, w, k, gamma)
    if samplers is None:
        samplers = [enumeration_sampler(a_children[i].seed_len) for i in range(split + 1)]
    samplers = list(samplers)
    if len(samplers) != split + 1:
        raise InputError(f"need one sampler per index 0..{split}, got {len(samplers)}")
    for i, g in enumerate(samplers):
        if g.m != a_children[i].seed_len:
            raise ConstructionError(
                f"sampler g_{i} emits {g.m} bits, flattened child seed is {a_children[i].seed_len}"
            )
        if g.cert is None:
            raise ContractError(f"sampler g_{i} is uncertified; certify() it first")
        if g.cert.method == "assumed" and not trust:
            raise ContractError(f"sampler g_{i} carries an assumed certificate; pass trust=True")
        if g.cert.eps > eps_req[i]:
            raise ConstructionError(
                f"sampler g_{i} accuracy fails eps_{i} <= gamma^{i + 1}/(w*binom(m-1,{i})): "
                f"{g.cert.eps} > {eps_req[i]}"
            )
        if g.cert.delta > delta_req:
            raise ConstructionError(
                f"sampler g_{i} failure fails delta <= gamma^{k + 1}/(w^2*binom(2m-1,{binding})): "
                f"{g.cert.delta} > {delta_req}"
            )

    flat_a = [flatten(a_children[i]) for i in range(split + 1)]
    flat_b = [flatten(b_children[i]) for i in range(split + 1)]
    len_a = tuple(samplers[i].d if i <= split else a_children[i].s_in for i in range(k + 1))
    len_b = tuple(samplers[j].d if j <= split else b_children[j].s_in for j in range(k + 1))
    terms = tuple([(i, k - i, 1) for i in range(k + 1)] + [(i, k - 1 - i, -1) for i in range(k)])
    s_in = max(len_a[i] + len_b[j] for i, j, _ in terms)
    s_out_needs = [samplers[i].n for i in range(split + 1)]
    s_out_needs += [a_children[i].s_out for i in range(split + 1, k + 1)]
    s_out_needs += [b_children[j].s_out for j in range(split + 1, k + 1)]
    s_out = max(s_out_needs) if s_out_needs else 0

    mu_a = [c.mu for c in a_children]
    mu_b = [c.mu for c in b_children]
    blocks = [mu_a[i] * mu_b[j] for i, j, _ in terms]
    starts = [0]
    for width in blocks:
        starts.append(starts[-1] + width)
    mu_total = starts[-1]
    mu_cap = comb(2 * m_bits - 1, k)
    if mu_total > mu_cap:
        raise ConstructionError(
            f"weight conclusion fails mu <= binom(2m-1, k): {mu_total} > {mu_cap}"
        )

    sampler_tuple = tuple(samplers)
    # pass-through children read prefixes of the longer merged seeds
    a_kids = tuple(a_children[i] if i <= split else pad_seeds(a_children[i], s_out, s_in)
                   for i in range(k + 1))
    b_kids = tuple(b_children)

    def a_entry(i: int, x: str, y: str, t: int):
        if i <= split:
            g = sampler_tuple[i]
            z = g.sample(x[:g.n], y[:len_a[i]])
            return flat_a[i].gen(z, "", t)
        return a_kids[i].gen(x, y, t)

    def b_entry(j: int, x: str, y: str, t: int):
        if j <= split:
            g = sampler_tuple[j]
            z = g.sample(x[:g.n], suffix(y, len_b[j]))
            return flat_b[j].gen(z, "", t)
        child = b_kids[j]
        return child.gen(x[:child.s_out], suffix(y, child.s_in), t)

    def gen(x: str, y: str, idx: int):
        t = bisect_right(starts, idx) - 1
        i, j, sign = terms[t]
        ta, tb = divmod(idx - starts[t], mu_b[j])
        sa, na = a_entry(i, x, y, ta)
        sb, nb = b_entry(j, x, y, tb)
        return sa + sb, sign * na * nb

    prpd = RobustPrpd(out_len=2 * m_bits, s_out=s_out, s_in=s_in, mu=mu_total, gen=gen)
    slots = tuple(
        SamplerSlot(i=i, out_bits=g.m, n=g.n, d=g.d,
                    eps_required=eps_req[i], delta_required=delta_req,
                    cert_method=g.cert.method, cert_eps=g.cert.eps, cert_delta=g.cert.delta)
        for i, g in enumerate(sampler_tuple)
    )
    return CkBuild(
        prpd=prpd, m_bits=m_bits, w=w, k=k, gamma=gamma, split=split,
        terms=terms, len_a=len_a, len_b=len_b, samplers=sampler_tuple, slots=slots,
        eps_required=eps_req, delta_required=delta_req, delta_binding_i=binding,
        child_summaries=tuple((c.s_out, c.s_in, c.mu) for c in a_children),
        a_entry=a_entry, b_entry=b_entry,
    )


# ---------------------------------------------------------------------------
# the full recursion and its ledger


@dataclass
class RecursionParams:
    gamma: Optional[Fraction] = None          # default 1/n^4 (n padded)
    k: Optional[int] = None                   # default: smallest k meeting eps
    c: int = 1                                # sampler seed-length constant
    sampler_mode: str = MODE_EXACT
    sampler_factory: Optional[Callable[[int, Fraction, Fraction], Sampler]] = None
    trust: bool = False


def brute_certified_enumeration_factory(m_bits: int, eps_req: Fraction, delta_req: Fraction) -> Sampler:
    """Default certified backend: exact sampler with a brute-force certificate."""
    g = enumeration_sampler(m_bits)
    ok, _ = certify(g, 0, 0)
    if not ok:
        raise ConstructionError("enumeration sampler failed its own certification")
    return g


@dataclass(frozen=True)
class LedgerNode:
    h: int
    k: int
    kind: str                                 # "terminal" | "merge"
    s_out: int
    s_in: int
    mu: int
    mu_cap: int
    error_bound: Fraction                     # (11^h * gamma)^(k+1)
    merge_gamma: Optional[Fraction] = None
    delta_binding_i: Optional[int] = None
    children: Tuple[Tuple[int, int, int, int], ...] = ()   # (i, s_out, s_in, mu)
    len_a: Tuple[int, ...] = ()
    len_b: Tuple[int, ...] = ()
    samplers: Tuple[SamplerSlot, ...] = ()


@dataclass
class SeedLedger:
    n: int
    n_padded: int
    w: int
    gamma: Fraction
    k: int
    c: int
    sampler_mode: str
    eps_target: Optional[Fraction]
    nodes: List[LedgerNode]

    def node(self, h: int, k: int) -> LedgerNode:
        for nd in self.nodes:
            if nd.h == h and nd.k == k:
                return nd
        raise KeyError((h, k))

    @property
    def top(self) -> LedgerNode:
        h = self.n_padded.bit_length() - 1
        return self.node(h, self.k)


def next_power_of_two(n: int) -> int:
    if n < 1:
        raise InputError("n must be at least 1")
    return 1 << (n - 1).bit_length()


def derive_k(n_padded: int, gamma: Fraction, eps: Fraction) -> int:
    """Smallest k whose full-cascade error bound meets eps."""
    h = n_padded.bit_length() - 1
    base = Fraction(11) ** h * gamma
    if base >= 1:
        raise InputError(
            f"per-level cascade 11^log2(n)*gamma = {base} is not below 1; "
            "decrease gamma or give k explicitly"
        )
    k = 0
    while base ** (k + 1) > eps:
        k += 1
        if k > 4096:
            raise InputError("eps unreachable at these parameters")
    return k


def is_terminal(h: int, k: int) -> bool:
    return h == 0 or 2 * k >= (1 << h)


def recursive_prpd(n: int, w: int, eps=None, params: Optional[RecursionParams] = None
                   ) -> Tuple[RobustPrpd, SeedLedger]:
    """Build the full generator table bottom-up and return the top node.

    n is padded to the next power of two (extra bits are simply ignored by
    shorter programs extended with identity steps). Terminal nodes
    (h = 0 or 2k >= 2^h) are the exact uniform generator with s_out = 0.
    """
    params = params or RecursionParams()
    if params.sampler_mode not in (MODE_EXACT, MODE_CERTIFIED):
        raise InputError(f"unknown sampler_mode {params.sampler_mode!r}")
    n_pad = next_power_of_two(n)
    height = n_pad.bit_length() - 1
    gamma = Fraction(params.gamma) if params.gamma is not None else Fraction(1, n_pad ** 4)
    if not (0 < gamma < 1):
        raise InputError("gamma must lie strictly between 0 and 1")
    if params.k is not None:
        k_top = params.k
        if k_top < 0:
            raise InputError("k must be non-negative")
    else:
        if eps is None:
            raise InputError("give either eps or params.k")
        k_top = derive_k(n_pad, gamma, Fraction(eps))

    factory = params.sampler_factory or brute_certified_enumeration_factory
    needed = set()
    stack = [(height, k_top)]
    while stack:
        key = stack.pop()
        if key in needed:
            continue
        needed.add(key)
        h, kk = key
        if not is_terminal(h, kk):
            stack.extend((h - 1, i) for i in range(kk + 1))
    table: Dict[Tuple[int, int], RobustPrpd] = {}
    nodes: List[LedgerNode] = []
    for h in range(height + 1):
        for kk in range(k_top + 1):
            if (h, kk) not in needed:
                continue
            cap = max(1, comb((1 << h) - 1, kk))
            bound = (Fraction(11) ** h * gamma) ** (kk + 1)
            if is_terminal(h, kk):
                prpd = uniform_prpd(1 << h)
                nodes.append(LedgerNode(h=h, k=kk, kind="terminal",
                                        s_out=prpd.s_out, s_in=prpd.s_in, mu=prpd.mu,
                                        mu_cap=cap, error_bound=bound))
            else:
                children = [table[(h - 1, i)] for i in range(kk + 1)]
                merge_gamma = Fraction(11) ** (h - 1) * gamma
                if params.sampler_mode == MODE_CERTIFIED:
                    eps_req, delta_req, _ = ck_requirements(children[0].out_len, w, kk, merge_gamma)
                    split = (kk + 1) // 2
                    samplers = [factory(children[i].seed_len, eps_req[i], delta_req)
                                for i in range(split + 1)]
                else:
                    samplers = None
                build = build_ck(children, children, w=w, gamma=merge_gamma,
                                 samplers=samplers, trust=params.trust)
                prpd = build.prpd
                nodes.append(LedgerNode(
                    h=h, k=kk, kind="merge",
                    s_out=prpd.s_out, s_in=prpd.s_in, mu=prpd.mu,
                    mu_cap=cap, error_bound=bound, merge_gamma=merge_gamma,
                    delta_binding_i=build.delta_binding_i,
                    children=tuple((i, c.s_out, c.s_in, c.mu) for i, c in enumerate(children)),
                    len_a=build.len_a, len_b=build.len_b, samplers=build.slots,
                ))
            table[(h, kk)] = prpd
    ledger = SeedLedger(n=n, n_padded=n_pad, w=w, gamma=gamma, k=k_top, c=params.c,
                        sampler_mode=params.sampler_mode,
                        eps_target=Fraction(eps) if eps is not None else None,
                        nodes=nodes)
    return table[(height, k_top)], ledger


# ---------------------------------------------------------------------------
# inductive seed-length bounds and the ledger check


def _log2_frac(q: Fraction) -> float:
    # exact for powers of two so dyadic desk parameters compare without wobble
    def lg(v: int) -> float:
        return float(v.bit_length() - 1) if v & (v - 1) == 0 else math.log2(v)

    return lg(q.numerator) - lg(q.denominator)


def inductive_seed_bounds(h: int, k: int, n: int, w: int, gamma: Fraction, c: int) -> Tuple[float, float]:
    """Inductive (s_out, s_in) bounds for node (h, k) under constant c."""
    L_n = _log2_frac(Fraction(n) / gamma)
    L_nw = _log2_frac(Fraction(n * w) / gamma)
    L_knw = _log2_frac(Fraction(max(k, 1) * n * w) / gamma)
    if k <= 1:
        s_out = h * (3 * c * k * L_n + 7 * c * L_nw)
        s_in = c * k * L_n + 4 * c * L_knw
    else:
        s_out = 4 * c * k * L_n + (math.ceil(math.log2(k)) + 1) * h * (10 * c * L_nw)
        s_in = c * k * L_n + h * (4 * c * L_knw)
    return s_out, s_in


def inductive_sampler_seed(i: int, k: int, n: int, w: int, gamma: Fraction, c: int) -> float:
    """Per-index sampler seed budget c*i*log2(n/gamma) + 2c*log2(knw/gamma)."""
    L_n = _log2_frac(Fraction(n) / gamma)
    L_knw = _log2_frac(Fraction(max(k, 1) * n * w) / gamma)
    return c * i * L_n + 2 * c * L_knw


@dataclass(frozen=True)
class LedgerCheck:
    h: int
    k: int
    name: str
    lhs: float
    rhs: float
    ok: bool

    @property
    def slack(self) -> float:
        return self.rhs - self.lhs


@dataclass
class LedgerReport:
    checks: List[LedgerCheck]

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def failures(self) -> List[LedgerCheck]:
        return [c for c in self.checks if not c.ok]


_TOL = 1e-9


def ledger_check(ledger: SeedLedger, c: Optional[int] = None) -> LedgerReport:
    """Replay every inductive inequality for every node actually constructed.

    Three families: used values against the inductive bounds, structural
    inequalities of the merge layout (non-overlap, pass-through lengths),
    and the arithmetic replay of the proof's chains at the configured c.
    """
    cc = c if c is not None else ledger.c
    n, w, gamma = ledger.n_padded, ledger.w, ledger.gamma
    checks: List[LedgerCheck] = []

    def add(h, k, name, lhs, rhs):
        checks.append(LedgerCheck(h=h, k=k, name=name, lhs=float(lhs), rhs=float(rhs),
                                  ok=float(lhs) <= float(rhs) + _TOL))

    for node in ledger.nodes:
        h, k = node.h, node.k
        so_bound, si_bound = inductive_seed_bounds(h, k, n, w, gamma, cc)
        add(h, k, "used s_out <= bound", node.s_out, so_bound)
        add(h, k, "used s_in <= bound", node.s_in, si_bound)
        add(h, k, "used mu <= max(1, binom(2^h-1,k))", node.mu, node.mu_cap)
        if node.kind == "terminal":
            add(h, k, "terminal s_out = 0", node.s_out, 0)
            continue

        split = (k + 1) // 2
        # structural: layout of the merge actually built
        for i, j in [(i, k - i) for i in range(k + 1)] + [(i, k - 1 - i) for i in range(k)]:
            add(h, k, f"prefix a_{i} + suffix b_{j} <= s_in", node.len_a[i] + node.len_b[j], node.s_in)
        for i, s_out_c, s_in_c, mu_c in node.children:
            if i > split:
                add(h, k, f"pass-through child s_out(A_{i}) <= s_out", s_out_c, node.s_out)
                add(h, k, f"pass-through child s_in(A_{i}) = prefix length", s_in_c, node.len_a[i])
        for slot in node.samplers:
            child = node.children[slot.i]
            add(h, k, f"sampler g_{slot.i} outer input <= s_out", slot.n, node.s_out)
            add(h, k, f"sampler g_{slot.i} output = flat child seed", slot.out_bits,
                child[1] + child[2])
            add(h, k, f"sampler g_{slot.i} output = flat child seed (lower)",
                child[1] + child[2], slot.out_bits)
            add(h, k, f"cert eps(g_{slot.i}) <= required", slot.cert_eps, slot.eps_required)
            add(h, k, f"cert delta(g_{slot.i}) <= required", slot.cert_delta, slot.delta_required)
        mu_sum = 0
        mus = [mu for (_, _, _, mu) in node.children]
        for i in range(k + 1):
            mu_sum += mus[i] * mus[k - i]
        for i in range(k):
            mu_sum += mus[i] * mus[k - 1 - i]
        add(h, k, "mu identity: sum of term blocks", node.mu, mu_sum)
        add(h, k, "mu identity (lower)", mu_sum, node.mu)

        # arithmetic replay of the proof's chains, global gamma, constant cc
        m_bits = 1 << (h - 1)
        eps_req, delta_req, _ = ck_requirements(m_bits, w, k, gamma)
        log_delta = -_log2_frac(delta_req)
        d_budget = [inductive_sampler_seed(i, k, n, w, gamma, cc) for i in range(k + 1)]
        for i in range(split + 1):
            need = cc * (-_log2_frac(eps_req[i])) + cc * math.log2(max(2.0, log_delta))
            add(h, k, f"replay: d_{i} formula covers c*log(1/eps_{i})+c*loglog(1/delta)",
                need, d_budget[i])
        for i in range(split + 1):
            for j in range(min(i, k - i) + 1):
                add(h, k, f"replay: d_{i}+d_{j} <= s_in bound", d_budget[i] + d_budget[j], si_bound)
        for i in range(split + 1, k + 1):
            _, si_child = inductive_seed_bounds(h - 1, i, n, w, gamma, cc)
            add(h, k, f"replay: s_in bound(h-1,{i}) + d_{k - i} <= s_in bound",
                si_child + d_budget[k - i], si_bound)
        for i in range(k + 1):
            so_child, _ = inductive_seed_bounds(h - 1, i, n, w, gamma, cc)
            add(h, k, f"replay: s_out bound(h-1,{i}) <= s_out bound", so_child, so_bound)
        for i in range(split + 1):
            so_child, si_child = inductive_seed_bounds(h - 1, i, n, w, gamma, cc)
            lhs = so_child + si_child + cc * log_delta + cc * (-_log2_frac(eps_req[i]))
            add(h, k, f"replay: sampler outer budget at i={i} <= s_out bound", lhs, so_bound)
    return LedgerReport(checks=checks)


# ---------------------------------------------------------------------------
# exact error measurement


def measure_robust_error(prpd: RobustPrpd, robp: Robp, a: int = 0, b: Optional[int] = None) -> Fraction:
    """E_x || E_y A(x, y) - exact average ||, by full enumeration."""
    if b is None:
        b = robp.n
    mf = matrix_form(prpd, robp, a, b)
    rf = robust_form(mf)
    target = exact_average(robp, a, b)
    total = Fraction(0)
    for x in all_bits(prpd.s_out):
        total += inf_norm(mat_sub(rf[x], target))
    return total / (1 << prpd.s_out)


def measure_average_error(prpd: RobustPrpd, robp: Robp, a: int = 0, b: Optional[int] = None) -> Fraction:
    """|| <A> - exact average ||, the plain (non-robust) approximation error."""
    if b is None:
        b = robp.n
    mf = matrix_form(prpd, robp, a, b)
    return inf_norm(mat_sub(mf.average(), exact_average(robp, a, b)))


# ---------------------------------------------------------------------------
# ledger serialization (line-oriented JSON-friendly dicts)


def _frac_str(q) -> str:
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


def _parse_frac(s: str) -> Fraction:
    num, _, den = s.partition("/")
    return Fraction(int(num), int(den or "1"))


def ledger_to_dict(ledger: SeedLedger) -> dict:
    return {
        "n": ledger.n,
        "n_padded": ledger.n_padded,
        "w": ledger.w,
        "gamma": _frac_str(ledger.gamma),
        "k": ledger.k,
        "c": ledger.c,
        "sampler_mode": ledger.sampler_mode,
        "eps_target": _frac_str(ledger.eps_target) if ledger.eps_target is not None else None,
        "nodes": [
            {
                "h": nd.h, "k": nd.k, "kind": nd.kind,
                "s_out": nd.s_out, "s_in": nd.s_in, "mu": nd.mu, "mu_cap": nd.mu_cap,
                "error_bound": _frac_str(nd.error_bound),
                "merge_gamma": _frac_str(nd.merge_gamma) if nd.merge_gamma is not None else None,
                "delta_binding_i": nd.delta_binding_i,
                "children": [list(t) for t in nd.children],
                "len_a": list(nd.len_a), "len_b": list(nd.len_b),
                "samplers": [
                    {
                        "i": s.i, "out_bits": s.out_bits, "n": s.n, "d": s.d,
                        "eps_required": _frac_str(s.eps_required),
                        "delta_required": _frac_str(s.delta_required),
                        "cert_method": s.cert_method,
                        "cert_eps": _frac_str(s.cert_eps),
                        "cert_delta": _frac_str(s.cert_delta),
                    }
                    for s in nd.samplers
                ],
            }
            for nd in ledger.nodes
        ],
    }


def ledger_from_dict(data: dict) -> SeedLedger:
    nodes = [
        LedgerNode(
            h=nd["h"], k=nd["k"], kind=nd["kind"],
            s_out=nd["s_out"], s_in=nd["s_in"], mu=nd["mu"], mu_cap=nd["mu_cap"],
            error_bound=_parse_frac(nd["error_bound"]),
            merge_gamma=_parse_frac(nd["merge_gamma"]) if nd.get("merge_gamma") else None,
            delta_binding_i=nd.get("delta_binding_i"),
            children=tuple(tuple(t) for t in nd.get("children", [])),
            len_a=tuple(nd.get("len_a", [])), len_b=tuple(nd.get("len_b", [])),
            samplers=tuple(
                SamplerSlot(
                    i=s["i"], out_bits=s["out_bits"], n=s["n"], d=s["d"],
                    eps_required=_parse_frac(s["eps_required"]),
                    delta_required=_parse_frac(s["delta_required"]),
                    cert_method=s["cert_method"],
                    cert_eps=_parse_frac(s["cert_eps"]),
                    cert_delta=_parse_frac(s["cert_delta"]),
                )
                for s in nd.get("samplers", [])
            ),
        )
        for nd in data["nodes"]
    ]
    return SeedLedger(
        n=data["n"], n_padded=data["n_padded"], w=data["w"],
        gamma=_parse_frac(data["gamma"]), k=data["k"], c=data["c"],
        sampler_mode=data["sampler_mode"],
        eps_target=_parse_frac(data["eps_target"]) if data.get("eps_target") else None,
        nodes=nodes,
    )
